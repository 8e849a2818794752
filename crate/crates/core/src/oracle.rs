//! Brute-force ground truth at desk scale: exact Cheeger constants, exact set
//! function minimization, dense generalized spectra for 2-uniform instances,
//! and seeded random instance generation.

use crate::error::{Error, Result};
use crate::hypergraph::{Hyperedge, SubmodularHypergraph};
use crate::submodular::CutWeightFn;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Enumeration budgets guarding the exponential oracles.
#[derive(Debug, Clone)]
pub struct OracleBudget {
    pub max_n_subsets: usize,
    pub max_n_partitions: usize,
    pub max_k: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_n_subsets: 20,
            max_n_partitions: 10,
            max_k: 3,
        }
    }
}

fn mask_to_set(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

/// Exact 2-way Cheeger constant by exhaustive enumeration of proper subsets;
/// ties resolved toward the smallest bitmask.
pub fn exact_h2(g: &SubmodularHypergraph) -> Result<(f64, Vec<usize>)> {
    exact_h2_budgeted(g, &OracleBudget::default())
}

pub fn exact_h2_budgeted(
    g: &SubmodularHypergraph,
    budget: &OracleBudget,
) -> Result<(f64, Vec<usize>)> {
    let n = g.n();
    if n > budget.max_n_subsets {
        return Err(Error::TooLarge {
            n,
            cap: budget.max_n_subsets,
        });
    }
    let full = (1u64 << n) - 1;
    let total = g.total_volume();
    let mut best = f64::INFINITY;
    let mut best_mask = 0u64;
    for mask in 1..full {
        let vol: f64 = (0..n)
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| g.mu()[v])
            .sum();
        let c = g.boundary_volume_with(|v| mask >> v & 1 == 1) / vol.min(total - vol);
        if c < best {
            best = c;
            best_mask = mask;
        }
    }
    Ok((best, mask_to_set(best_mask, n)))
}

/// Exact k-way Cheeger constant: minimum over k disjoint nonempty subsets
/// (not necessarily covering) of the maximum conductance.
pub fn exact_hk(g: &SubmodularHypergraph, k: usize) -> Result<f64> {
    exact_hk_budgeted(g, k, &OracleBudget::default())
}

pub fn exact_hk_budgeted(
    g: &SubmodularHypergraph,
    k: usize,
    budget: &OracleBudget,
) -> Result<f64> {
    let n = g.n();
    if n > budget.max_n_partitions {
        return Err(Error::TooLarge {
            n,
            cap: budget.max_n_partitions,
        });
    }
    if k == 0 || k > budget.max_k.max(1) || k > n {
        return Err(Error::Config(format!("k = {k} outside budget")));
    }
    // Conductance of every proper subset, then scan label assignments
    // 0 = unused, 1..=k = part index.
    let full = (1u64 << n) - 1;
    let mut cond = vec![f64::INFINITY; (full + 1) as usize];
    let total = g.total_volume();
    for mask in 1..full {
        let vol: f64 = (0..n)
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| g.mu()[v])
            .sum();
        cond[mask as usize] =
            g.boundary_volume_with(|v| mask >> v & 1 == 1) / vol.min(total - vol);
    }
    let mut best = f64::INFINITY;
    let mut assignment = vec![0usize; n];
    loop {
        let mut masks = vec![0u64; k];
        for v in 0..n {
            if assignment[v] > 0 {
                masks[assignment[v] - 1] |= 1 << v;
            }
        }
        if masks.iter().all(|&m| m != 0) {
            let worst = masks
                .iter()
                .map(|&m| cond[m as usize])
                .fold(f64::NEG_INFINITY, f64::max);
            best = best.min(worst);
        }
        // next assignment in mixed radix k+1
        let mut pos = 0;
        while pos < n {
            assignment[pos] += 1;
            if assignment[pos] <= k {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    Ok(best)
}

/// Exhaustive set-function minimization over all `2^n` subsets (the empty set
/// included); ties resolved toward the smallest bitmask.
pub fn exact_sfm(objective: impl Fn(u64) -> f64, n: usize) -> Result<(f64, u64)> {
    exact_sfm_budgeted(objective, n, &OracleBudget::default())
}

pub fn exact_sfm_budgeted(
    objective: impl Fn(u64) -> f64,
    n: usize,
    budget: &OracleBudget,
) -> Result<(f64, u64)> {
    if n > budget.max_n_subsets {
        return Err(Error::TooLarge {
            n,
            cap: budget.max_n_subsets,
        });
    }
    let mut best = f64::INFINITY;
    let mut best_mask = 0u64;
    for mask in 0..(1u64 << n) {
        let v = objective(mask);
        if v < best {
            best = v;
            best_mask = mask;
        }
    }
    Ok((best, best_mask))
}

/// Full generalized spectrum of `L x = λ diag(μ) x` for a 2-uniform
/// homogeneous hypergraph, via the symmetric dense solve on
/// `diag(μ)^{-1/2} L diag(μ)^{-1/2}`. Eigenvalues ascending; eigenvectors
/// normalized with `‖x‖_{ℓ2,μ} = 1`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

pub fn dense_graph_spectrum(g: &SubmodularHypergraph) -> Result<Spectrum> {
    let n = g.n();
    if n > 500 {
        return Err(Error::TooLarge { n, cap: 500 });
    }
    for e in g.edges() {
        if e.arity() != 2 || !e.weight().is_homogeneous() {
            return Err(Error::NotGraph(format!(
                "edge {:?} has arity {} (homogeneous: {})",
                e.members(),
                e.arity(),
                e.weight().is_homogeneous()
            )));
        }
    }
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        let (u, v) = (e.members()[0], e.members()[1]);
        lap[(u, u)] += e.theta();
        lap[(v, v)] += e.theta();
        lap[(u, v)] -= e.theta();
        lap[(v, u)] -= e.theta();
    }
    let inv_sqrt: Vec<f64> = g.mu().iter().map(|&m| 1.0 / m.sqrt()).collect();
    let mut sym = lap;
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    // symmetrize against round-off
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (sym[(i, j)] + sym[(j, i)]);
            sym[(i, j)] = avg;
            sym[(j, i)] = avg;
        }
    }
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &idx in &order {
        eigenvalues.push(eig.eigenvalues[idx]);
        let col = eig.eigenvectors.column(idx);
        eigenvectors.push((0..n).map(|v| col[v] * inv_sqrt[v]).collect());
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Round entries within `tol` of zero to exactly zero (sign bookkeeping for
/// nodal domains of numerically computed eigenvectors).
pub fn snap_zeros(x: &[f64], tol: f64) -> Vec<f64> {
    x.iter()
        .map(|&v| if v.abs() <= tol { 0.0 } else { v })
        .collect()
}

/// Weight family for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomWeightKind {
    Homogeneous,
    Alpha,
    Table,
}

#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub max_arity: usize,
    pub kind: RandomWeightKind,
    pub seed: u64,
}

/// Connected-by-construction random instance: a random spanning tree of
/// 2-edges plus random hyperedges, weights drawn from the requested family,
/// `μ = degrees`. Emits `max(m, n-1)` hyperedges.
pub fn random_instance(spec: &InstanceSpec) -> SubmodularHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n.max(2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let mut members = vec![order[i], parent];
        members.sort_unstable();
        edges.push(make_edge(members, spec.kind, &mut rng));
    }
    let extra = spec.m.saturating_sub(n - 1);
    let cap = spec.max_arity.min(n).max(2);
    for _ in 0..extra {
        let arity = rng.gen_range(2..=cap);
        let mut pool: Vec<usize> = (0..n).collect();
        pool.shuffle(&mut rng);
        let mut members: Vec<usize> = pool[..arity].to_vec();
        members.sort_unstable();
        edges.push(make_edge(members, spec.kind, &mut rng));
    }
    SubmodularHypergraph::with_degree_weights(n, edges)
        .expect("spanning structure gives positive degrees")
}

fn make_edge(members: Vec<usize>, kind: RandomWeightKind, rng: &mut ChaCha8Rng) -> Hyperedge {
    let arity = members.len();
    let weight = match kind {
        RandomWeightKind::Homogeneous => CutWeightFn::homogeneous(arity),
        RandomWeightKind::Alpha => {
            let alpha = rng.gen_range(0.05..=0.5);
            CutWeightFn::alpha(arity, alpha).unwrap()
        }
        RandomWeightKind::Table => random_table(arity, rng),
    };
    Hyperedge::new(members, 1.0, weight).unwrap()
}

/// Random normalized symmetric submodular function: a nonnegative graph-cut
/// part plus a concave cardinality profile (which also guarantees incidence),
/// sup-normalized.
pub fn random_table(arity: usize, rng: &mut ChaCha8Rng) -> CutWeightFn {
    assert!((2..=12).contains(&arity));
    let mut pair = vec![vec![0.0; arity]; arity];
    for i in 0..arity {
        for j in (i + 1)..arity {
            if rng.gen_bool(0.7) {
                let w = rng.gen_range(0.1..1.0);
                pair[i][j] = w;
                pair[j][i] = w;
            }
        }
    }
    let gamma: f64 = rng.gen_range(0.5..=1.0);
    let scale: f64 = rng.gen_range(0.2..=1.0);
    let profile = |count: usize| -> f64 {
        let m = count.min(arity - count) as f64;
        scale * m.powf(gamma)
    };
    let full = (1u64 << arity) - 1;
    let mut values = vec![0.0; (full + 1) as usize];
    let mut max_val: f64 = 0.0;
    for mask in 0..=full {
        let mut cut = 0.0;
        for i in 0..arity {
            for j in (i + 1)..arity {
                if (mask >> i & 1) != (mask >> j & 1) {
                    cut += pair[i][j];
                }
            }
        }
        let v = cut + profile(mask.count_ones() as usize);
        values[mask as usize] = v;
        max_val = max_val.max(v);
    }
    for v in values.iter_mut() {
        *v /= max_val;
    }
    CutWeightFn::table(values).expect("construction is submodular by design")
}

/// Replace two disjoint hyperedges by their merged sum, a single table edge
/// whose weight vanishes exactly on each original side. Returns `None` if no
/// suitable pair exists (combined arity must stay within table range).
pub fn inject_merged_edge(
    g: &SubmodularHypergraph,
    rng: &mut ChaCha8Rng,
) -> Option<SubmodularHypergraph> {
    let edges = g.edges();
    let mut candidates = Vec::new();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let disjoint = edges[i]
                .members()
                .iter()
                .all(|v| !edges[j].members().contains(v));
            if disjoint && edges[i].arity() + edges[j].arity() <= 8 {
                candidates.push((i, j));
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let &(i, j) = candidates.get(rng.gen_range(0..candidates.len()))?;
    let (a, b) = (&edges[i], &edges[j]);
    let k1 = a.arity();
    let k2 = b.arity();
    let theta = a.theta() + b.theta();
    let mut members = a.members().to_vec();
    members.extend_from_slice(b.members());
    let mut values = vec![0.0; 1 << (k1 + k2)];
    for mask in 0..(1u64 << (k1 + k2)) {
        let m1 = mask & ((1 << k1) - 1);
        let m2 = mask >> k1;
        values[mask as usize] = (a.theta() * a.weight().value_of_mask(m1)
            + b.theta() * b.weight().value_of_mask(m2))
            / theta;
    }
    let merged = Hyperedge::new(members, theta, CutWeightFn::table_unchecked(values)).ok()?;
    let mut new_edges: Vec<Hyperedge> = Vec::new();
    for (idx, e) in edges.iter().enumerate() {
        if idx != i && idx != j {
            new_edges.push(e.clone());
        }
    }
    new_edges.push(merged);
    SubmodularHypergraph::new(g.n(), g.mu().to_vec(), new_edges).ok()
}

/// Small named instances used across tests and docs.
pub mod fixtures {
    use super::*;

    /// Path graph on `n` vertices as 2-uniform homogeneous hyperedges,
    /// `μ = degrees`.
    pub fn path(n: usize) -> SubmodularHypergraph {
        let edges = (0..n - 1)
            .map(|i| {
                Hyperedge::new(vec![i, i + 1], 1.0, CutWeightFn::homogeneous(2)).unwrap()
            })
            .collect();
        SubmodularHypergraph::with_degree_weights(n, edges).unwrap()
    }

    /// One homogeneous hyperedge over `k` vertices, `ϑ = 1`, `μ = 1`.
    pub fn single_homogeneous(k: usize) -> SubmodularHypergraph {
        let e = Hyperedge::new((0..k).collect(), 1.0, CutWeightFn::homogeneous(k)).unwrap();
        SubmodularHypergraph::new(k, vec![1.0; k], vec![e]).unwrap()
    }

    /// Triangle graph, `μ = degrees = (2, 2, 2)`.
    pub fn triangle() -> SubmodularHypergraph {
        let edges = [(0, 1), (1, 2), (0, 2)]
            .iter()
            .map(|&(u, v)| {
                Hyperedge::new(vec![u, v], 1.0, CutWeightFn::homogeneous(2)).unwrap()
            })
            .collect();
        SubmodularHypergraph::with_degree_weights(3, edges).unwrap()
    }

    /// One 4-vertex hyperedge that is secretly two disjoint pair edges:
    /// `ϑ = 2`, `w = (w_{01} + w_{23}) / 2`, so `w({0,1}) = 0`.
    pub fn merged_pair_edge() -> SubmodularHypergraph {
        let mut values = vec![0.0; 16];
        for mask in 0..16u64 {
            let cut01 = ((mask & 1) ^ ((mask >> 1) & 1)) as f64;
            let cut23 = (((mask >> 2) & 1) ^ ((mask >> 3) & 1)) as f64;
            values[mask as usize] = (cut01 + cut23) / 2.0;
        }
        let e =
            Hyperedge::new(vec![0, 1, 2, 3], 2.0, CutWeightFn::table_unchecked(values)).unwrap();
        SubmodularHypergraph::new(4, vec![1.0; 4], vec![e]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2_examples() {
        let (h, s) = exact_h2(&fixtures::path(4)).unwrap();
        assert!((h - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s, vec![0, 1]);

        let (h, _) = exact_h2(&fixtures::single_homogeneous(3)).unwrap();
        assert_eq!(h, 1.0);

        let (h, _) = exact_h2(&fixtures::merged_pair_edge()).unwrap();
        assert_eq!(h, 0.0);
    }

    #[test]
    fn h2_budget() {
        let spec = InstanceSpec {
            n: 21,
            m: 20,
            max_arity: 2,
            kind: RandomWeightKind::Homogeneous,
            seed: 7,
        };
        let g = random_instance(&spec);
        assert!(matches!(exact_h2(&g), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn hk_matches_h2_and_extends() {
        for seed in 0..5 {
            let g = random_instance(&InstanceSpec {
                n: 6,
                m: 7,
                max_arity: 3,
                kind: RandomWeightKind::Table,
                seed,
            });
            let (h2, _) = exact_h2(&g).unwrap();
            let hk2 = exact_hk(&g, 2).unwrap();
            assert!((h2 - hk2).abs() < 1e-12, "seed {seed}");
        }
        let h3 = exact_hk(&fixtures::path(4), 3).unwrap();
        assert!(h3.is_finite() && h3 > 0.0);
        let two = SubmodularHypergraph::new(
            4,
            vec![1.0; 4],
            vec![
                Hyperedge::new(vec![0, 1], 1.0, CutWeightFn::homogeneous(2)).unwrap(),
                Hyperedge::new(vec![2, 3], 1.0, CutWeightFn::homogeneous(2)).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(exact_hk(&two, 2).unwrap(), 0.0);
    }

    #[test]
    fn sfm_cardinality() {
        let (v, mask) = exact_sfm(|m| m.count_ones() as f64, 5).unwrap();
        assert_eq!((v, mask), (0.0, 0));
    }

    #[test]
    fn spectrum_examples() {
        let s = dense_graph_spectrum(&fixtures::path(2)).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-12);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-12);

        let s = dense_graph_spectrum(&fixtures::triangle()).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-12);
        assert!((s.eigenvalues[1] - 1.5).abs() < 1e-12);
        assert!((s.eigenvalues[2] - 1.5).abs() < 1e-12);

        let two = SubmodularHypergraph::new(
            4,
            vec![1.0; 4],
            vec![
                Hyperedge::new(vec![0, 1], 1.0, CutWeightFn::homogeneous(2)).unwrap(),
                Hyperedge::new(vec![2, 3], 1.0, CutWeightFn::homogeneous(2)).unwrap(),
            ],
        )
        .unwrap();
        let s = dense_graph_spectrum(&two).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-12 && s.eigenvalues[1].abs() < 1e-12);

        assert!(dense_graph_spectrum(&fixtures::single_homogeneous(3)).is_err());
    }

    #[test]
    fn random_instance_deterministic_and_valid() {
        let spec = InstanceSpec {
            n: 6,
            m: 5,
            max_arity: 4,
            kind: RandomWeightKind::Alpha,
            seed: 1,
        };
        let a = random_instance(&spec);
        let b = random_instance(&spec);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert!(a.is_connected());
        assert_eq!(a.mu(), a.degrees().as_slice());

        let p2 = random_instance(&InstanceSpec {
            n: 2,
            m: 1,
            max_arity: 2,
            kind: RandomWeightKind::Homogeneous,
            seed: 0,
        });
        assert_eq!(p2.n(), 2);
        assert_eq!(p2.edges().len(), 1);
        assert_eq!(p2.edges()[0].members(), &[0, 1]);
    }

    #[test]
    fn merged_injection_preserves_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_instance(&InstanceSpec {
            n: 7,
            m: 8,
            max_arity: 3,
            kind: RandomWeightKind::Table,
            seed: 11,
        });
        let merged = inject_merged_edge(&g, &mut rng).expect("pair available");
        for mask in 0..(1u64 << 7) {
            let s: Vec<usize> = mask_to_set(mask, 7);
            assert!((g.boundary_volume(&s) - merged.boundary_volume(&s)).abs() < 1e-12);
        }
        // and reduce restores positivity of proper cuts while preserving volumes
        let reduced = merged.reduce().unwrap();
        for mask in 0..(1u64 << 7) {
            let s: Vec<usize> = mask_to_set(mask, 7);
            assert!((g.boundary_volume(&s) - reduced.boundary_volume(&s)).abs() < 1e-12);
        }
    }
}
