//! Submodular hypergraph data model: vertex measures, scaled hyperedge cut
//! oracles, volumes, conductance, connectivity, and the weight-preserving
//! hyperedge reduction.

use crate::error::{Error, Result};
use crate::submodular::CutWeightFn;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

const ZERO_CUT_TOL: f64 = 1e-12;

/// A hyperedge: an ordered list of distinct vertex ids, a positive scale `ϑ`,
/// and a normalized symmetric submodular cut oracle over the members.
/// Subset bitmasks in the oracle are indexed by member position.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperedge {
    members: Vec<usize>,
    theta: f64,
    weight: CutWeightFn,
}

impl Hyperedge {
    pub fn new(members: Vec<usize>, theta: f64, weight: CutWeightFn) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidHypergraph(format!(
                "hyperedge has {} members, need at least 2",
                members.len()
            )));
        }
        if weight.arity() != members.len() {
            return Err(Error::InvalidHypergraph(format!(
                "weight arity {} does not match member count {}",
                weight.arity(),
                members.len()
            )));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidHypergraph(format!(
                "theta must be positive and finite, got {theta}"
            )));
        }
        let mut seen = members.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != members.len() {
            return Err(Error::InvalidHypergraph(
                "hyperedge members must be distinct".into(),
            ));
        }
        Ok(Hyperedge {
            members,
            theta,
            weight,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn weight(&self) -> &CutWeightFn {
        &self.weight
    }

    pub fn arity(&self) -> usize {
        self.members.len()
    }

    /// `w_e(S ∩ e)` for a set given by a membership predicate. Cardinality
    /// kinds only count members, so arbitrarily large edges are fine.
    pub fn cut_with(&self, contains: impl Fn(usize) -> bool) -> f64 {
        if self.weight.is_table() {
            let mut mask = 0u64;
            for (i, &v) in self.members.iter().enumerate() {
                if contains(v) {
                    mask |= 1 << i;
                }
            }
            self.weight.value_of_mask(mask)
        } else {
            let count = self.members.iter().filter(|&&v| contains(v)).count();
            self.weight.value_of_count(count).unwrap()
        }
    }

    /// Restriction of a global vector to the member coordinates.
    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        self.members.iter().map(|&v| x[v]).collect()
    }
}

/// A submodular hypergraph: `n` vertices with positive weights `μ` and a list
/// of hyperedges with scaled submodular cut oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularHypergraph {
    n: usize,
    mu: Vec<f64>,
    edges: Vec<Hyperedge>,
}

impl SubmodularHypergraph {
    pub fn new(n: usize, mu: Vec<f64>, edges: Vec<Hyperedge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidHypergraph("vertex count must be positive".into()));
        }
        if mu.len() != n {
            return Err(Error::InvalidHypergraph(format!(
                "mu has length {}, expected {n}",
                mu.len()
            )));
        }
        if mu.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidHypergraph(
                "vertex weights must be positive and finite".into(),
            ));
        }
        for e in &edges {
            if let Some(&v) = e.members().iter().find(|&&v| v >= n) {
                return Err(Error::InvalidHypergraph(format!(
                    "member {v} out of range for {n} vertices"
                )));
            }
        }
        Ok(SubmodularHypergraph { n, mu, edges })
    }

    /// Construct with `μ_v = d_v = Σ_{e ∋ v} ϑ_e`, the degree preset.
    /// Errors if some vertex has degree zero.
    pub fn with_degree_weights(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        let mut mu = vec![0.0; n];
        for e in &edges {
            for &v in e.members() {
                mu[v] += e.theta();
            }
        }
        Self::new(n, mu, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// `d_v = Σ_{e ∋ v} ϑ_e`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            for &v in e.members() {
                d[v] += e.theta();
            }
        }
        d
    }

    /// `vol(S) = Σ_{v ∈ S} μ_v`.
    pub fn volume(&self, s: &[usize]) -> f64 {
        s.iter().map(|&v| self.mu[v]).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// `vol(∂S) = Σ_e ϑ_e w_e(S ∩ e)`.
    pub fn boundary_volume(&self, s: &[usize]) -> f64 {
        let in_s = self.membership(s);
        self.boundary_volume_with(|v| in_s[v])
    }

    /// Boundary volume for a set given by a membership predicate.
    pub fn boundary_volume_with(&self, contains: impl Fn(usize) -> bool + Copy) -> f64 {
        self.edges
            .iter()
            .map(|e| e.theta() * e.cut_with(contains))
            .sum()
    }

    /// `c(S) = vol(∂S) / min(vol S, vol S̄)`.
    pub fn conductance(&self, s: &[usize]) -> Result<f64> {
        let in_s = self.membership(s);
        let count = in_s.iter().filter(|&&b| b).count();
        if count == 0 || count == self.n {
            return Err(Error::EmptySide);
        }
        let vol_s: f64 = (0..self.n).filter(|&v| in_s[v]).map(|v| self.mu[v]).sum();
        let vol_c = self.total_volume() - vol_s;
        Ok(self.boundary_volume_with(|v| in_s[v]) / vol_s.min(vol_c))
    }

    /// `τ = max_v d_v / μ_v`; vertices in no hyperedge contribute 0.
    pub fn tau(&self) -> f64 {
        self.degrees()
            .iter()
            .zip(&self.mu)
            .map(|(d, m)| d / m)
            .fold(0.0, f64::max)
    }

    fn membership(&self, s: &[usize]) -> Vec<bool> {
        let mut in_s = vec![false; self.n];
        for &v in s {
            in_s[v] = true;
        }
        in_s
    }

    /// Splits every hyperedge with a zero proper cut until all remaining
    /// proper cuts are positive, preserving `vol(∂S)` on every subset.
    /// Verifies the splitting identity and reports `NotSubmodular` if the
    /// oracle violates it beyond 1e-12.
    pub fn reduce(&self) -> Result<Self> {
        self.reduce_impl(true)
    }

    /// Reduction without identity verification; structurally infallible for
    /// oracles that passed construction.
    pub(crate) fn reduce_unchecked(&self) -> Self {
        self.reduce_impl(false)
            .expect("unverified reduction cannot fail")
    }

    fn reduce_impl(&self, verify: bool) -> Result<Self> {
        let mut queue: VecDeque<Hyperedge> = self.edges.iter().cloned().collect();
        let mut out = Vec::new();
        while let Some(e) = queue.pop_front() {
            if e.arity() < 2 {
                continue;
            }
            match find_zero_proper_cut(&e) {
                None => out.push(e),
                Some(s1) => {
                    let (left, right) = split_edge(&e, s1, verify)?;
                    if let Some(e1) = left {
                        queue.push_back(e1);
                    }
                    if let Some(e2) = right {
                        queue.push_back(e2);
                    }
                }
            }
        }
        SubmodularHypergraph::new(self.n, self.mu.clone(), out)
    }

    /// Connectivity per the boundary-volume definition: the hypergraph is
    /// reduced first, after which incidence reachability is equivalent.
    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.n).collect();
        self.connected_components(&all).len() == 1
    }

    /// Connected components of the sub-incidence graph induced on `active`,
    /// computed on the reduced hypergraph. Components partition `active`.
    pub fn connected_components(&self, active: &[usize]) -> Vec<Vec<usize>> {
        self.reduce_unchecked().components_reduced(active)
    }

    pub(crate) fn components_reduced(&self, active: &[usize]) -> Vec<Vec<usize>> {
        let mut in_a = vec![false; self.n];
        for &v in active {
            in_a[v] = true;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], v: usize) -> usize {
            let mut root = v;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = v;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for e in &self.edges {
            let mut first: Option<usize> = None;
            for &v in e.members() {
                if !in_a[v] {
                    continue;
                }
                match first {
                    None => first = Some(v),
                    Some(u) => {
                        let ru = find(&mut parent, u);
                        let rv = find(&mut parent, v);
                        parent[ru.max(rv)] = ru.min(rv);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        let mut sorted_active: Vec<usize> = active.to_vec();
        sorted_active.sort_unstable();
        sorted_active.dedup();
        for v in sorted_active {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Same structure with every cut oracle replaced by the homogeneous one.
    pub fn homogenized(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Hyperedge {
                members: e.members.clone(),
                theta: e.theta,
                weight: CutWeightFn::homogeneous(e.arity()),
            })
            .collect();
        SubmodularHypergraph {
            n: self.n,
            mu: self.mu.clone(),
            edges,
        }
    }

    /// Re-parametrize every cardinality-based alpha edge with a new `alpha`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let weight = if e.weight().alpha_param().is_some() {
                CutWeightFn::alpha(e.arity(), alpha)?
            } else {
                e.weight().clone()
            };
            edges.push(Hyperedge {
                members: e.members.clone(),
                theta: e.theta,
                weight,
            });
        }
        Ok(SubmodularHypergraph {
            n: self.n,
            mu: self.mu.clone(),
            edges,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let file: HypergraphFile = self.into();
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: HypergraphFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// First proper nonempty subset (by mask order) with zero cut weight, if any.
/// Cardinality kinds are positive on proper subsets by construction.
fn find_zero_proper_cut(e: &Hyperedge) -> Option<u64> {
    if !e.weight().is_table() {
        return None;
    }
    let full = (1u64 << e.arity()) - 1;
    (1..full).find(|&m| e.weight().value_of_mask(m) <= ZERO_CUT_TOL)
}

/// Splits `e` at the zero cut `S₁` into `e₁ = S₁` and `e₂ = e \ S₁` with
/// `ϑ_{e_i} = ϑ_e · max_{S ⊆ e_i} w_e(S)` and `ϑ_{e_i} w_{e_i}(S) = ϑ_e w_e(S)`.
/// Sides whose weight vanishes identically (always the case for singletons)
/// are dropped. When `verify` is set the additive splitting identity is
/// checked on every subset of `e`.
fn split_edge(
    e: &Hyperedge,
    s1: u64,
    verify: bool,
) -> Result<(Option<Hyperedge>, Option<Hyperedge>)> {
    let k = e.arity();
    let full = (1u64 << k) - 1;
    let side_masks = [s1, full & !s1];
    let mut sides: Vec<Option<Hyperedge>> = Vec::with_capacity(2);
    let mut side_data = Vec::with_capacity(2);

    for &sm in &side_masks {
        let positions: Vec<usize> = (0..k).filter(|&i| sm >> i & 1 == 1).collect();
        let members: Vec<usize> = positions.iter().map(|&i| e.members()[i]).collect();
        let sub = positions.len();
        // Tabulate ϑ_e·w_e on subsets of this side.
        let mut scaled = vec![0.0; 1 << sub];
        let mut max_val: f64 = 0.0;
        for local in 0..(1u64 << sub) {
            let mut parent_mask = 0u64;
            for (j, &pos) in positions.iter().enumerate() {
                if local >> j & 1 == 1 {
                    parent_mask |= 1 << pos;
                }
            }
            let v = e.theta() * e.weight().value_of_mask(parent_mask);
            scaled[local as usize] = v;
            max_val = max_val.max(v);
        }
        side_data.push((members.clone(), scaled.clone(), max_val));
        if sub < 2 || max_val <= ZERO_CUT_TOL {
            sides.push(None);
            continue;
        }
        let theta = max_val;
        let values: Vec<f64> = scaled.iter().map(|v| v / theta).collect();
        sides.push(Some(Hyperedge {
            members,
            theta,
            weight: CutWeightFn::table_unchecked(values),
        }));
    }

    if verify {
        let tol = ZERO_CUT_TOL * e.theta().max(1.0);
        let (_, left_scaled, _) = &side_data[0];
        let (_, right_scaled, _) = &side_data[1];
        for mask in 0..=full {
            let l = compress(mask, side_masks[0]);
            let r = compress(mask, side_masks[1]);
            let sum = left_scaled[l as usize] + right_scaled[r as usize];
            let orig = e.theta() * e.weight().value_of_mask(mask);
            if (sum - orig).abs() > tol {
                return Err(Error::NotSubmodular(format!(
                    "splitting identity fails at mask {mask}: {sum} vs {orig}"
                )));
            }
        }
    }

    let mut it = sides.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

/// Extract the bits of `mask` selected by `side` into a dense local mask.
fn compress(mask: u64, side: u64) -> u64 {
    let mut out = 0u64;
    let mut j = 0;
    for i in 0..64 {
        if side >> i & 1 == 1 {
            if mask >> i & 1 == 1 {
                out |= 1 << j;
            }
            j += 1;
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct HypergraphFile {
    n: usize,
    mu: Vec<f64>,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    members: Vec<usize>,
    theta: f64,
    weight: WeightFile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum WeightFile {
    Homogeneous,
    Alpha { params: AlphaParams },
    Table { params: TableParams },
}

#[derive(Serialize, Deserialize)]
struct AlphaParams {
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct TableParams {
    values: Vec<f64>,
}

impl From<&SubmodularHypergraph> for HypergraphFile {
    fn from(g: &SubmodularHypergraph) -> Self {
        let edges = g
            .edges
            .iter()
            .map(|e| EdgeFile {
                members: e.members.clone(),
                theta: e.theta,
                weight: if e.weight.is_homogeneous() {
                    WeightFile::Homogeneous
                } else if let Some(alpha) = e.weight.alpha_param() {
                    WeightFile::Alpha {
                        params: AlphaParams { alpha },
                    }
                } else {
                    let full = (1u64 << e.arity()) - 1;
                    let values = (0..=full).map(|m| e.weight.value_of_mask(m)).collect();
                    WeightFile::Table {
                        params: TableParams { values },
                    }
                },
            })
            .collect();
        HypergraphFile {
            n: g.n,
            mu: g.mu.clone(),
            edges,
        }
    }
}

impl TryFrom<HypergraphFile> for SubmodularHypergraph {
    type Error = Error;

    fn try_from(file: HypergraphFile) -> Result<Self> {
        let mut edges = Vec::with_capacity(file.edges.len());
        for ef in file.edges {
            let arity = ef.members.len();
            let weight = match ef.weight {
                WeightFile::Homogeneous => CutWeightFn::homogeneous(arity),
                WeightFile::Alpha { params } => CutWeightFn::alpha(arity, params.alpha)?,
                WeightFile::Table { params } => CutWeightFn::table(params.values)?,
            };
            edges.push(Hyperedge::new(ef.members, ef.theta, weight)?);
        }
        SubmodularHypergraph::new(file.n, file.mu, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;

    #[test]
    fn volumes_on_fixtures() {
        let p4 = fixtures::path(4);
        assert_eq!(p4.mu(), &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(p4.volume(&[0, 1]), 3.0);
        assert_eq!(p4.volume(&[]), 0.0);
        let h1 = fixtures::single_homogeneous(3);
        assert_eq!(h1.volume(&[0, 2]), 2.0);
    }

    #[test]
    fn boundary_volumes() {
        let h1 = fixtures::single_homogeneous(3);
        assert_eq!(h1.boundary_volume(&[0]), 1.0);
        assert_eq!(h1.boundary_volume(&[0, 1, 2]), 0.0);
        let p4 = fixtures::path(4);
        assert_eq!(p4.boundary_volume(&[0, 1]), 1.0);
        assert_eq!(p4.boundary_volume(&[]), 0.0);
    }

    #[test]
    fn conductance_examples() {
        let p4 = fixtures::path(4);
        assert!((p4.conductance(&[0, 1]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p4.conductance(&[0]).unwrap(), 1.0);
        assert!(matches!(p4.conductance(&[]), Err(Error::EmptySide)));
        assert!(matches!(
            p4.conductance(&[0, 1, 2, 3]),
            Err(Error::EmptySide)
        ));
        let h1 = fixtures::single_homogeneous(3);
        assert_eq!(h1.conductance(&[0]).unwrap(), 1.0);
    }

    #[test]
    fn tau_examples() {
        assert_eq!(fixtures::path(4).tau(), 1.0);
        let h1 = fixtures::single_homogeneous(3);
        assert_eq!(h1.tau(), 1.0);
        let skew = SubmodularHypergraph::new(
            3,
            vec![2.0, 1.0, 1.0],
            vec![Hyperedge::new(vec![0, 1, 2], 1.0, CutWeightFn::homogeneous(3)).unwrap()],
        )
        .unwrap();
        assert_eq!(skew.tau(), 1.0);
    }

    #[test]
    fn reduce_splits_merged_edge() {
        let g = fixtures::merged_pair_edge();
        let r = g.reduce().unwrap();
        assert_eq!(r.edges().len(), 2);
        for e in r.edges() {
            assert_eq!(e.arity(), 2);
            assert!((e.theta() - 1.0).abs() < 1e-12);
        }
        // boundary volumes preserved on all 16 subsets
        for mask in 0..16u32 {
            let s: Vec<usize> = (0..4).filter(|&v| mask >> v & 1 == 1).collect();
            let before = g.boundary_volume(&s);
            let after = r.boundary_volume(&s);
            assert!(
                (before - after).abs() < 1e-12,
                "mask {mask}: {before} vs {after}"
            );
        }
    }

    #[test]
    fn reduce_keeps_clean_edges() {
        let h1 = fixtures::single_homogeneous(3);
        let r = h1.reduce().unwrap();
        assert_eq!(r.edges().len(), 1);
        assert_eq!(r.edges()[0].arity(), 3);
        let p2 = fixtures::path(2);
        assert_eq!(p2.reduce().unwrap().edges().len(), 1);
    }

    #[test]
    fn connectivity_uses_boundary_definition() {
        let h1 = fixtures::single_homogeneous(3);
        assert!(h1.is_connected());

        // Two disjoint homogeneous edges: 2 components.
        let g = SubmodularHypergraph::new(
            4,
            vec![1.0; 4],
            vec![
                Hyperedge::new(vec![0, 1], 1.0, CutWeightFn::homogeneous(2)).unwrap(),
                Hyperedge::new(vec![2, 3], 1.0, CutWeightFn::homogeneous(2)).unwrap(),
            ],
        )
        .unwrap();
        assert!(!g.is_connected());

        // Merged edge with a zero cut: raw incidence says connected, the
        // boundary-volume definition does not.
        let merged = fixtures::merged_pair_edge();
        assert!(!merged.is_connected());
        let comps = merged.connected_components(&[0, 1, 2, 3]);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn json_round_trip() {
        let g = fixtures::merged_pair_edge();
        let text = g.to_json().unwrap();
        let back = SubmodularHypergraph::from_json(&text).unwrap();
        assert_eq!(back.n(), g.n());
        for mask in 0..16u32 {
            let s: Vec<usize> = (0..4).filter(|&v| mask >> v & 1 == 1).collect();
            assert_eq!(g.boundary_volume(&s), back.boundary_volume(&s));
        }
        let alpha = SubmodularHypergraph::new(
            3,
            vec![1.0; 3],
            vec![Hyperedge::new(vec![0, 1, 2], 2.0, CutWeightFn::alpha(3, 0.3).unwrap()).unwrap()],
        )
        .unwrap();
        let back = SubmodularHypergraph::from_json(&alpha.to_json().unwrap()).unwrap();
        assert_eq!(back.edges()[0].weight().alpha_param(), Some(0.3));
    }
}
