//! Cut-weight oracles, Lovász extensions, subgradients, and base-polytope
//! geometry.
//!
//! Every hyperedge carries a normalized symmetric submodular function over its
//! members. This module evaluates those functions, extends them to real
//! vectors, and projects onto the scaled base polytope `ϑ·B` — the primitive
//! behind the coordinate-descent inner solver.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest arity for explicitly tabulated weights.
pub const TABLE_ARITY_CAP: usize = 20;

/// Largest arity for extreme-point enumeration (|e|! points).
pub const EXTREME_POINT_CAP: usize = 8;

/// Exhaustive oracle validation below this arity, sampled above.
const EXHAUSTIVE_VALIDATION_CAP: usize = 12;

const ZERO_TOL: f64 = 1e-12;
const MEMBERSHIP_TOL: f64 = 1e-9;

/// Cardinality-based cut weight from the alpha family:
/// `1/2 + 1/2·min{1, |S|/⌈α|e|⌉, |e\S|/⌈α|e|⌉}` on proper subsets, 0 at the
/// extremes. A small slack stabilizes the ceiling against float fuzz in
/// `α·|e|`.
pub fn alpha_weight(size_s: usize, size_e: usize, alpha: f64) -> f64 {
    if size_s == 0 || size_s == size_e {
        return 0.0;
    }
    let cap = (alpha * size_e as f64 - 1e-12).ceil().max(1.0);
    let s = size_s as f64 / cap;
    let t = (size_e - size_s) as f64 / cap;
    0.5 + 0.5 * s.min(t).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum WeightKind {
    Homogeneous,
    AlphaCardinality { alpha: f64 },
    Table { values: Vec<f64> },
}

/// A normalized symmetric submodular cut oracle over the members of one
/// hyperedge. Subsets are addressed by bitmask over member *positions*
/// (bit `i` = i-th member), not global vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutWeightFn {
    kind: WeightKind,
    arity: usize,
}

impl CutWeightFn {
    /// Weight 1 on every proper nonempty subset.
    pub fn homogeneous(arity: usize) -> Self {
        CutWeightFn {
            kind: WeightKind::Homogeneous,
            arity,
        }
    }

    /// Cardinality-based weights evaluated from the closed form at call time,
    /// so the arity may be large.
    pub fn alpha(arity: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 0.5], got {alpha}"
            )));
        }
        Ok(CutWeightFn {
            kind: WeightKind::AlphaCardinality { alpha },
            arity,
        })
    }

    /// Explicit table of `2^arity` values indexed by subset bitmask.
    /// Validates normalization, symmetry, submodularity and incidence
    /// (exhaustively up to arity 12, sampled above).
    pub fn table(values: Vec<f64>) -> Result<Self> {
        let arity = validate_table(&values)?;
        Ok(CutWeightFn {
            kind: WeightKind::Table { values },
            arity,
        })
    }

    /// Table constructor that skips validation. Intended for weights that are
    /// valid by construction (reduction artifacts) and for tests.
    pub fn table_unchecked(values: Vec<f64>) -> Self {
        let arity = values.len().trailing_zeros() as usize;
        debug_assert_eq!(values.len(), 1 << arity);
        CutWeightFn {
            kind: WeightKind::Table { values },
            arity,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.kind, WeightKind::Homogeneous)
    }

    pub fn is_table(&self) -> bool {
        matches!(self.kind, WeightKind::Table { .. })
    }

    pub fn alpha_param(&self) -> Option<f64> {
        match self.kind {
            WeightKind::AlphaCardinality { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// Value on the subset encoded by `mask`. Requires arity ≤ 64; tables are
    /// capped far below that and cardinality kinds only use the popcount.
    pub fn value_of_mask(&self, mask: u64) -> f64 {
        debug_assert!(self.arity <= 64);
        debug_assert_eq!(mask & !mask_full(self.arity), 0);
        match &self.kind {
            WeightKind::Table { values } => values[mask as usize],
            _ => self.value_of_count(mask.count_ones() as usize).unwrap(),
        }
    }

    /// Value from the subset cardinality alone; `None` for table weights.
    pub fn value_of_count(&self, count: usize) -> Option<f64> {
        debug_assert!(count <= self.arity);
        match &self.kind {
            WeightKind::Homogeneous => {
                Some(if count == 0 || count == self.arity { 0.0 } else { 1.0 })
            }
            WeightKind::AlphaCardinality { alpha } => {
                Some(alpha_weight(count, self.arity, *alpha))
            }
            WeightKind::Table { .. } => None,
        }
    }

    /// Whether the value depends on the concrete subset or only on its size.
    pub fn is_cardinality_based(&self) -> bool {
        !self.is_table()
    }
}

fn mask_full(arity: usize) -> u64 {
    if arity == 64 {
        u64::MAX
    } else {
        (1u64 << arity) - 1
    }
}

fn validate_table(values: &[f64]) -> Result<usize> {
    if values.is_empty() || !values.len().is_power_of_two() {
        return Err(Error::NotSubmodular(format!(
            "table length {} is not a power of two",
            values.len()
        )));
    }
    let arity = values.len().trailing_zeros() as usize;
    if arity > TABLE_ARITY_CAP {
        return Err(Error::ArityTooLarge {
            arity,
            cap: TABLE_ARITY_CAP,
        });
    }
    let full = mask_full(arity);
    for (m, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < -MEMBERSHIP_TOL {
            return Err(Error::NotSubmodular(format!(
                "value {v} at mask {m} is negative or non-finite"
            )));
        }
    }
    if values[0].abs() > MEMBERSHIP_TOL || values[full as usize].abs() > MEMBERSHIP_TOL {
        return Err(Error::NotSubmodular(
            "weight is not normalized: F(∅) or F(e) is nonzero".into(),
        ));
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (max - 1.0).abs() > MEMBERSHIP_TOL {
        return Err(Error::NotSubmodular(format!(
            "weight is not normalized: max over subsets is {max}, expected 1"
        )));
    }
    for v in 0..arity {
        if values[1usize << v] <= ZERO_TOL {
            return Err(Error::NotSubmodular(format!(
                "member {v} is not incident: F({{v}}) = 0"
            )));
        }
    }
    if arity <= EXHAUSTIVE_VALIDATION_CAP {
        for m in 0..=full {
            let sym = full & !m;
            if (values[m as usize] - values[sym as usize]).abs() > MEMBERSHIP_TOL {
                return Err(Error::NotSubmodular(format!(
                    "symmetry violated at mask {m}"
                )));
            }
        }
        // Local characterization: F(S+a) + F(S+b) ≥ F(S+a+b) + F(S).
        for m in 0..=full {
            for a in 0..arity {
                if m >> a & 1 == 1 {
                    continue;
                }
                for b in (a + 1)..arity {
                    if m >> b & 1 == 1 {
                        continue;
                    }
                    let sa = m | 1 << a;
                    let sb = m | 1 << b;
                    let sab = sa | 1 << b;
                    let lhs = values[sa as usize] + values[sb as usize];
                    let rhs = values[sab as usize] + values[m as usize];
                    if lhs + MEMBERSHIP_TOL < rhs {
                        return Err(Error::NotSubmodular(format!(
                            "submodularity violated at masks ({sa}, {sb})"
                        )));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let s: u64 = rng.gen::<u64>() & full;
            let t: u64 = rng.gen::<u64>() & full;
            if (values[s as usize] - values[(full & !s) as usize]).abs() > MEMBERSHIP_TOL {
                return Err(Error::NotSubmodular(format!(
                    "symmetry violated at mask {s}"
                )));
            }
            let lhs = values[s as usize] + values[t as usize];
            let rhs = values[(s | t) as usize] + values[(s & t) as usize];
            if lhs + MEMBERSHIP_TOL < rhs {
                return Err(Error::NotSubmodular(format!(
                    "submodularity violated at masks ({s}, {t})"
                )));
            }
        }
    }
    Ok(arity)
}

/// A point of a (possibly scaled) base polytope, one coordinate per member of
/// the owning hyperedge. Coordinates outside the edge are implicitly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub edge: usize,
    pub coords: Vec<f64>,
}

impl BasePoint {
    pub fn new(edge: usize, coords: Vec<f64>) -> Self {
        BasePoint { edge, coords }
    }
}

/// Ordering positions by nonincreasing `x`, ties by ascending `dir`, then by
/// ascending position. With `dir = None` this is the deterministic greedy
/// order used throughout.
fn sorted_order(x: &[f64], dir: Option<&[f64]>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x[b].total_cmp(&x[a])
            .then_with(|| match dir {
                Some(d) => d[a].total_cmp(&d[b]),
                None => std::cmp::Ordering::Equal,
            })
            .then(a.cmp(&b))
    });
    order
}

/// Greedy base-polytope vertex for a fixed ordering: marginal gains of the
/// prefix sets.
fn greedy_for_order(w: &CutWeightFn, order: &[usize]) -> Vec<f64> {
    let k = order.len();
    let mut y = vec![0.0; k];
    let mut prev = 0.0;
    let mut mask = 0u64;
    for (step, &i) in order.iter().enumerate() {
        let cur = if w.is_table() {
            mask |= 1 << i;
            w.value_of_mask(mask)
        } else {
            w.value_of_count(step + 1).unwrap()
        };
        y[i] = cur - prev;
        prev = cur;
    }
    y
}

/// Lovász extension by the chain formula over the nonincreasing reordering of
/// `x`; ties are broken by ascending position (any tie-break yields the same
/// value).
pub fn lovasz(w: &CutWeightFn, x: &[f64]) -> f64 {
    let k = w.arity();
    assert_eq!(x.len(), k, "vector length must match arity");
    if k < 2 {
        return 0.0;
    }
    let order = sorted_order(x, None);
    let mut total = 0.0;
    let mut prefix = 0.0;
    let mut mask = 0u64;
    for j in 0..k - 1 {
        let i = order[j];
        prefix = if w.is_table() {
            mask |= 1 << i;
            w.value_of_mask(mask)
        } else {
            w.value_of_count(j + 1).unwrap()
        };
        total += prefix * (x[order[j]] - x[order[j + 1]]);
    }
    let _ = prefix;
    total
}

/// The deterministic greedy subgradient: a vertex of `∇f(x) ⊆ B`, with
/// `⟨y, x⟩ = f(x)` and `y(e) = 0`.
pub fn subgradient(w: &CutWeightFn, x: &[f64]) -> BasePoint {
    assert_eq!(x.len(), w.arity());
    let order = sorted_order(x, None);
    BasePoint::new(0, greedy_for_order(w, &order))
}

/// Linear oracle over the face `∇f(x)`: among greedy vertices consistent with
/// the ordering of `x`, returns one minimizing `⟨dir, ·⟩` (ties within
/// constant blocks of `x` resolved by `dir`, then position).
pub fn face_subgradient(w: &CutWeightFn, x: &[f64], dir: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), w.arity());
    assert_eq!(dir.len(), w.arity());
    let order = sorted_order(x, Some(dir));
    greedy_for_order(w, &order)
}

/// All extreme points of the (unscaled) base polytope, one greedy vertex per
/// permutation, deduplicated.
pub fn extreme_points(w: &CutWeightFn) -> Result<Vec<BasePoint>> {
    extreme_points_capped(w, EXTREME_POINT_CAP)
}

pub fn extreme_points_capped(w: &CutWeightFn, cap: usize) -> Result<Vec<BasePoint>> {
    let k = w.arity();
    if k > cap {
        return Err(Error::ArityTooLarge { arity: k, cap });
    }
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut order: Vec<usize> = (0..k).collect();
    permute(&mut order, 0, &mut |perm| {
        pts.push(greedy_for_order(w, perm));
    });
    pts.sort_by(|a, b| {
        for (u, v) in a.iter().zip(b) {
            match u.total_cmp(v) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    pts.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(u, v)| (u - v).abs() <= ZERO_TOL));
    Ok(pts.into_iter().map(|c| BasePoint::new(0, c)).collect())
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// Exhaustive membership test for `y ∈ ϑ·B`: checks `y(S) ≤ ϑ·w(S)` on all
/// subsets and `y(e) = 0`, with tolerance 1e-9.
pub fn check_membership(w: &CutWeightFn, theta: f64, y: &[f64]) -> bool {
    let k = w.arity();
    assert_eq!(y.len(), k);
    assert!(k <= TABLE_ARITY_CAP, "membership check is exponential in arity");
    let full = mask_full(k);
    let total: f64 = y.iter().sum();
    if total.abs() > MEMBERSHIP_TOL {
        return false;
    }
    for mask in 0..=full {
        let ys: f64 = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| y[i]).sum();
        if ys > theta * w.value_of_mask(mask) + MEMBERSHIP_TOL {
            return false;
        }
    }
    true
}

/// Euclidean projection of `-a` onto `ϑ·B`, i.e. `argmin_{y ∈ ϑB} ‖y + a‖²`,
/// by the Fujishige–Wolfe minimum-norm-point algorithm run on the translated
/// polytope `ϑB + a`.
pub fn min_norm_shifted(w: &CutWeightFn, theta: f64, a: &[f64]) -> Result<BasePoint> {
    let k = w.arity();
    assert_eq!(a.len(), k);
    if k == 0 {
        return Ok(BasePoint::new(0, Vec::new()));
    }
    const EPS_GAP: f64 = 1e-10;
    const EPS_DECREASE: f64 = 1e-12;
    let max_iter = (10.0 * (k * k) as f64 * (1e10f64).ln()).ceil() as usize + 64;

    // Linear oracle on ϑB + a: greedy vertex for ascending direction.
    let lo = |d: &[f64]| -> Vec<f64> {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&p, &q| d[p].total_cmp(&d[q]).then(p.cmp(&q)));
        let g = greedy_for_order(w, &order);
        (0..k).map(|i| theta * g[i] + a[i]).collect()
    };

    let mut pts: Vec<Vec<f64>> = vec![lo(a)];
    let mut lam: Vec<f64> = vec![1.0];
    let mut x = pts[0].clone();
    let mut prev_norm2 = dot(&x, &x);
    let mut converged = false;

    for _ in 0..max_iter {
        let q = lo(&x);
        let gap = dot(&x, &x) - dot(&x, &q);
        if gap < EPS_GAP {
            converged = true;
            break;
        }
        if pts
            .iter()
            .any(|p| p.iter().zip(&q).all(|(u, v)| (u - v).abs() <= ZERO_TOL))
        {
            // Oracle re-proposed a corral vertex: numerically stalled.
            converged = gap < 1e-6;
            break;
        }
        pts.push(q);
        lam.push(0.0);

        // Minor cycles: affine minimizer, clipped back into the simplex.
        loop {
            let alpha = affine_minimizer(&pts);
            if alpha.iter().all(|&t| t >= -1e-12) {
                lam = alpha.iter().map(|&t| t.max(0.0)).collect();
                let s: f64 = lam.iter().sum();
                for l in lam.iter_mut() {
                    *l /= s;
                }
                break;
            }
            let mut t = 1.0f64;
            for i in 0..lam.len() {
                if alpha[i] < 0.0 {
                    t = t.min(lam[i] / (lam[i] - alpha[i]));
                }
            }
            for i in 0..lam.len() {
                lam[i] = (1.0 - t) * lam[i] + t * alpha[i];
            }
            let mut keep = Vec::with_capacity(lam.len());
            for i in 0..lam.len() {
                keep.push(lam[i] > 1e-12);
            }
            if keep.iter().all(|&b| b) {
                // Nothing dropped; avoid cycling by clamping the smallest out.
                let (imin, _) = lam
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap();
                keep[imin] = false;
            }
            let mut new_pts = Vec::new();
            let mut new_lam = Vec::new();
            for i in 0..lam.len() {
                if keep[i] {
                    new_pts.push(pts[i].clone());
                    new_lam.push(lam[i]);
                }
            }
            pts = new_pts;
            lam = new_lam;
            let s: f64 = lam.iter().sum();
            for l in lam.iter_mut() {
                *l /= s;
            }
            if pts.len() == 1 {
                break;
            }
        }

        x = combine(&pts, &lam, k);
        let n2 = dot(&x, &x);
        if prev_norm2 - n2 < EPS_DECREASE {
            converged = true;
            break;
        }
        prev_norm2 = n2;
    }

    if !converged {
        return Err(Error::NoConvergence {
            iterations: max_iter,
        });
    }
    let coords: Vec<f64> = (0..k).map(|i| x[i] - a[i]).collect();
    Ok(BasePoint::new(0, coords))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn combine(pts: &[Vec<f64>], lam: &[f64], k: usize) -> Vec<f64> {
    let mut x = vec![0.0; k];
    for (p, &l) in pts.iter().zip(lam) {
        for i in 0..k {
            x[i] += l * p[i];
        }
    }
    x
}

/// Minimizer of `‖Σ α_i p_i‖²` subject to `Σ α_i = 1` via the KKT system on
/// the Gram matrix, with a small ridge retry on singularity.
fn affine_minimizer(pts: &[Vec<f64>]) -> Vec<f64> {
    let m = pts.len();
    if m == 1 {
        return vec![1.0];
    }
    let solve = |ridge: f64| -> Option<Vec<f64>> {
        let mut kkt = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..m {
                kkt[(i, j)] = dot(&pts[i], &pts[j]);
            }
            kkt[(i, i)] += ridge;
            kkt[(i, m)] = 1.0;
            kkt[(m, i)] = 1.0;
        }
        let mut rhs = nalgebra::DVector::zeros(m + 1);
        rhs[m] = 1.0;
        kkt.lu().solve(&rhs).map(|sol| sol.as_slice()[..m].to_vec())
    };
    solve(0.0)
        .or_else(|| solve(1e-12))
        .or_else(|| solve(1e-9))
        .unwrap_or_else(|| vec![1.0 / m as f64; m])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homog(k: usize) -> CutWeightFn {
        CutWeightFn::homogeneous(k)
    }

    #[test]
    fn alpha_weight_formula() {
        assert_eq!(alpha_weight(1, 10, 0.2), 0.75);
        assert_eq!(alpha_weight(2, 10, 0.2), 1.0);
        assert_eq!(alpha_weight(0, 10, 0.2), 0.0);
        assert_eq!(alpha_weight(10, 10, 0.2), 0.0);
        // symmetry in |S|
        for s in 0..=10 {
            assert_eq!(alpha_weight(s, 10, 0.13), alpha_weight(10 - s, 10, 0.13));
        }
    }

    #[test]
    fn lovasz_homogeneous_chain() {
        let w = homog(3);
        assert_eq!(lovasz(&w, &[3.0, 1.0, 0.0]), 3.0);
        assert_eq!(lovasz(&w, &[5.0, 5.0, 5.0]), 0.0);
    }

    #[test]
    fn lovasz_alpha_indicator() {
        let w = CutWeightFn::alpha(10, 0.2).unwrap();
        let mut x = vec![0.0; 10];
        x[3] = 1.0;
        assert!((lovasz(&w, &x) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lovasz_tie_break_irrelevant() {
        // Constant blocks: any consistent ordering yields the same value.
        let vals = vec![0.0, 0.6, 1.0, 0.6, 0.6, 1.0, 0.6, 0.0];
        let w = CutWeightFn::table(vals).unwrap();
        let x = [2.0, 2.0, -1.0];
        let direct = lovasz(&w, &x);
        // Evaluate with the other tie order by nudging then taking the limit value.
        let alt = w.value_of_mask(0b011) * (2.0 - -1.0);
        assert!((direct - alt).abs() < 1e-12);
    }

    #[test]
    fn subgradient_greedy() {
        let w = homog(3);
        let y = subgradient(&w, &[3.0, 1.0, 0.0]);
        assert_eq!(y.coords, vec![1.0, 0.0, -1.0]);
        let y = subgradient(&homog(2), &[0.0, 5.0]);
        assert_eq!(y.coords, vec![-1.0, 1.0]);
        // constant input: still a base point with ⟨y, x⟩ = 0 = f(x)
        let y = subgradient(&w, &[2.0, 2.0, 2.0]);
        let f = lovasz(&w, &[2.0, 2.0, 2.0]);
        let ip: f64 = y.coords.iter().map(|c| c * 2.0).sum();
        assert!((ip - f).abs() < 1e-12);
    }

    #[test]
    fn extreme_points_counts() {
        let pts = extreme_points(&homog(2)).unwrap();
        assert_eq!(pts.len(), 2);
        let pts = extreme_points(&homog(3)).unwrap();
        assert_eq!(pts.len(), 6);
        for p in &pts {
            let mut sorted = p.coords.clone();
            sorted.sort_by(f64::total_cmp);
            assert_eq!(sorted, vec![-1.0, 0.0, 1.0]);
            assert!(check_membership(&homog(3), 1.0, &p.coords));
        }
        let zero = CutWeightFn::table_unchecked(vec![0.0; 8]);
        let pts = extreme_points(&zero).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].coords, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn extreme_points_cap() {
        match extreme_points(&homog(9)) {
            Err(Error::ArityTooLarge { arity: 9, cap: 8 }) => {}
            other => panic!("expected ArityTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn membership_examples() {
        let w = homog(3);
        assert!(check_membership(&w, 1.0, &[1.0, 0.0, -1.0]));
        assert!(!check_membership(&w, 1.0, &[1.5, 0.0, -1.5]));
        assert!(check_membership(&w, 1.0, &[0.0, 0.0, 0.0]));
    }

    #[test]
    fn min_norm_examples() {
        let w = homog(2);
        let y = min_norm_shifted(&w, 1.0, &[-2.0, 0.0]).unwrap();
        assert!((y.coords[0] - 1.0).abs() < 1e-8 && (y.coords[1] + 1.0).abs() < 1e-8);

        let y = min_norm_shifted(&w, 1.0, &[0.0, 0.0]).unwrap();
        assert!(y.coords.iter().all(|c| c.abs() < 1e-8));

        let y = min_norm_shifted(&w, 1.0, &[-0.5, 0.5]).unwrap();
        assert!((y.coords[0] - 0.5).abs() < 1e-8 && (y.coords[1] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn min_norm_stays_in_polytope() {
        let vals = vec![0.0, 0.7, 1.0, 0.7, 0.7, 1.0, 0.7, 0.0];
        let w = CutWeightFn::table(vals).unwrap();
        for (i, a) in [
            [1.3, -0.2, 0.4],
            [-2.0, -2.0, 4.0],
            [0.0, 0.1, -0.1],
            [5.0, 5.0, 5.0],
        ]
        .iter()
        .enumerate()
        {
            let theta = 1.0 + i as f64;
            let y = min_norm_shifted(&w, theta, a).unwrap();
            assert!(check_membership(&w, theta, &y.coords), "a = {a:?}");
        }
    }

    #[test]
    fn table_validation_rejects_bad_oracles() {
        // not symmetric
        assert!(CutWeightFn::table(vec![0.0, 1.0, 0.5, 0.0]).is_err());
        // not normalized
        assert!(CutWeightFn::table(vec![0.0, 0.5, 0.5, 0.0]).is_err());
        // zero singleton (vertex not incident)
        assert!(CutWeightFn::table(vec![0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0]).is_err());
        // valid homogeneous table
        assert!(CutWeightFn::table(vec![0.0, 1.0, 1.0, 0.0]).is_ok());
    }
}
