//! p-Laplacian functionals and spectral machinery: `Q_p`, Rayleigh quotients,
//! operator application, eigenpair verification, centering, and nodal domains.
//!
//! The p-Laplacian is set-valued: `Δ_p(x) = Σ_e ϑ_e f_e(x)^{p-1} ∇f_e(x)`
//! where each `∇f_e(x)` is a face of the base polytope. An eigenpair `(λ, x)`
//! is certified by exhibiting a selection from the faces whose sum matches
//! `λ·U·φ_p(x)` within tolerance.

use crate::error::{Error, Result};
use crate::hypergraph::SubmodularHypergraph;
use crate::submodular::{face_subgradient, lovasz, subgradient, BasePoint};
use serde::{Deserialize, Serialize};

/// `(φ_p(x))_v = |x_v|^{p-1} sgn(x_v)`. At `p = 1` the set-valued sign at
/// zero entries is represented by 0; `verify_eigenpair` widens those
/// coordinates to the full interval.
pub fn phi_p(x: &[f64], p: f64) -> Vec<f64> {
    assert!(p >= 1.0);
    x.iter()
        .map(|&v| {
            if v == 0.0 {
                0.0
            } else if p == 1.0 {
                v.signum()
            } else {
                v.abs().powf(p - 1.0) * v.signum()
            }
        })
        .collect()
}

/// `Q_p(x) = Σ_e ϑ_e f_e(x)^p`.
pub fn q_p(g: &SubmodularHypergraph, x: &[f64], p: f64) -> f64 {
    assert!(p >= 1.0);
    g.edges()
        .iter()
        .map(|e| {
            let f = lovasz(e.weight(), &e.restrict(x));
            let fp = if p == 1.0 {
                f
            } else if p == 2.0 {
                f * f
            } else {
                f.powf(p)
            };
            e.theta() * fp
        })
        .sum()
}

/// One selection from `Δ_p(x)`, using the deterministic greedy subgradient of
/// every hyperedge. Satisfies `⟨x, result⟩ = Q_p(x)` and `⟨1, result⟩ = 0`.
pub fn apply_laplacian(g: &SubmodularHypergraph, x: &[f64], p: f64) -> Vec<f64> {
    assert!(p >= 1.0);
    let mut out = vec![0.0; g.n()];
    for e in g.edges() {
        let xl = e.restrict(x);
        let f = lovasz(e.weight(), &xl);
        let coeff = if p == 1.0 {
            e.theta()
        } else {
            if f <= 0.0 {
                continue;
            }
            e.theta() * f.powf(p - 1.0)
        };
        let y = subgradient(e.weight(), &xl);
        for (i, &v) in e.members().iter().enumerate() {
            out[v] += coeff * y.coords[i];
        }
    }
    out
}

/// `μ_p^+`, `μ^0`, `μ_p^-`: measure of the positive, zero and negative parts,
/// weighted by `|x|^{p-1}` on the sign-definite parts.
pub fn mu_split(x: &[f64], mu: &[f64], p: f64) -> (f64, f64, f64) {
    let mut plus = 0.0;
    let mut zero = 0.0;
    let mut minus = 0.0;
    for (&v, &m) in x.iter().zip(mu) {
        if v > 0.0 {
            plus += m * pow_abs(v, p - 1.0);
        } else if v < 0.0 {
            minus += m * pow_abs(v, p - 1.0);
        } else {
            zero += m;
        }
    }
    (plus, zero, minus)
}

fn pow_abs(v: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0
    } else if q == 1.0 {
        v.abs()
    } else {
        v.abs().powf(q)
    }
}

/// Smallest weighted median of `x`: the smallest minimizer of
/// `c ↦ Σ_v μ_v |x_v - c|`.
pub fn weighted_median(x: &[f64], mu: &[f64]) -> f64 {
    let mut pairs: Vec<(f64, f64)> = x.iter().cloned().zip(mu.iter().cloned()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = mu.iter().sum();
    let mut below = 0.0;
    for &(v, m) in &pairs {
        below += m;
        if 2.0 * below >= total {
            return v;
        }
    }
    pairs.last().map(|p| p.0).unwrap_or(0.0)
}

/// `Z_{p,μ}(x) = min_c Σ_v μ_v |x_v - c|^p`: returns the minimizing `c*`
/// (smallest one at p = 1) and the value. Closed forms at p ∈ {1, 2}, golden
/// section on the convex 1-D problem otherwise.
pub fn z_p_mu(x: &[f64], mu: &[f64], p: f64) -> (f64, f64) {
    assert!(p >= 1.0);
    assert_eq!(x.len(), mu.len());
    let value_at = |c: f64| -> f64 {
        x.iter()
            .zip(mu)
            .map(|(&v, &m)| m * pow_abs(v - c, p))
            .sum()
    };
    if p == 1.0 {
        let c = weighted_median(x, mu);
        return (c, value_at(c));
    }
    if p == 2.0 {
        let total: f64 = mu.iter().sum();
        let c = x.iter().zip(mu).map(|(&v, &m)| m * v).sum::<f64>() / total;
        return (c, value_at(c));
    }
    let (mut lo, mut hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi - lo < 1e-12 {
        return (lo, value_at(lo));
    }
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c1 = hi - inv_phi * (hi - lo);
    let mut c2 = lo + inv_phi * (hi - lo);
    let mut f1 = value_at(c1);
    let mut f2 = value_at(c2);
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - inv_phi * (hi - lo);
            f1 = value_at(c1);
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + inv_phi * (hi - lo);
            f2 = value_at(c2);
        }
    }
    let c = 0.5 * (lo + hi);
    (c, value_at(c))
}

fn is_constant(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

/// `𝓡_p(x) = Q_p(x) / Z_{p,μ}(x)`, the shift-optimal Rayleigh quotient.
pub fn rayleigh(g: &SubmodularHypergraph, x: &[f64], p: f64) -> Result<f64> {
    if is_constant(x) {
        return Err(Error::ConstantInput);
    }
    let (_, z) = z_p_mu(x, g.mu(), p);
    Ok(q_p(g, x, p) / z)
}

/// `R_p(x) = Q_p(x) / ‖x‖^p_{ℓp,μ}`, the sphere-restricted quotient.
pub fn rayleigh_sphere(g: &SubmodularHypergraph, x: &[f64], p: f64) -> Result<f64> {
    let norm_p: f64 = x
        .iter()
        .zip(g.mu())
        .map(|(&v, &m)| m * pow_abs(v, p))
        .sum();
    if norm_p <= 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok(q_p(g, x, p) / norm_p)
}

/// Strong and weak nodal domains of `x`: connected components (in the reduced
/// hypergraph's incidence graph) of the strictly / weakly sign-definite
/// vertex sets.
#[derive(Debug, Clone, Serialize)]
pub struct NodalDomains {
    pub strong_pos: Vec<Vec<usize>>,
    pub strong_neg: Vec<Vec<usize>>,
    pub weak_pos: Vec<Vec<usize>>,
    pub weak_neg: Vec<Vec<usize>>,
}

impl NodalDomains {
    pub fn strong_count(&self) -> usize {
        self.strong_pos.len() + self.strong_neg.len()
    }

    pub fn weak_count(&self) -> usize {
        self.weak_pos.len() + self.weak_neg.len()
    }
}

pub fn nodal_domains(g: &SubmodularHypergraph, x: &[f64]) -> NodalDomains {
    assert_eq!(x.len(), g.n());
    let reduced = g.reduce_unchecked();
    let collect = |pred: &dyn Fn(f64) -> bool| -> Vec<Vec<usize>> {
        let active: Vec<usize> = (0..g.n()).filter(|&v| pred(x[v])).collect();
        if active.is_empty() {
            Vec::new()
        } else {
            reduced.components_reduced(&active)
        }
    };
    NodalDomains {
        strong_pos: collect(&|v| v > 0.0),
        strong_neg: collect(&|v| v < 0.0),
        weak_pos: collect(&|v| v >= 0.0),
        weak_neg: collect(&|v| v <= 0.0),
    }
}

/// A verified eigenpair: the vector (normalized in `S_{p,μ}`), the residual
/// of the best selection from the subgradient faces, and that selection as a
/// witness per hyperedge.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenpairCertificate {
    pub lambda: f64,
    pub p: f64,
    pub residual: f64,
    pub x: Vec<f64>,
    pub witnesses: Vec<BasePoint>,
}

#[derive(Debug, Clone)]
pub struct Rejection {
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub enum VerifyOutcome {
    Accepted(EigenpairCertificate),
    Rejected(Rejection),
}

impl VerifyOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, VerifyOutcome::Accepted(_))
    }

    pub fn residual(&self) -> f64 {
        match self {
            VerifyOutcome::Accepted(c) => c.residual,
            VerifyOutcome::Rejected(r) => r.residual,
        }
    }
}

const FW_MAX_ITER: usize = 10_000;

/// Certify or reject `(λ, x)` as an eigenpair of `Δ_p`.
///
/// Minimizes `‖Σ_e ϑ_e f_e(x)^{p-1} y_e − λ·U·φ_p(x)‖₂` over selections
/// `y_e ∈ ∇f_e(x)` by Frank–Wolfe on the product of argmax faces; the linear
/// oracle is the greedy permutation sorted by `x` with ties resolved toward
/// the current residual. At `p = 1` coordinates with `x_v = 0` may absorb any
/// value in `λμ_v[-1, 1]`, so the residual is clipped there. Accepts iff the
/// final residual is at most `eps`.
pub fn verify_eigenpair(
    g: &SubmodularHypergraph,
    x: &[f64],
    lambda: f64,
    p: f64,
    eps: f64,
) -> Result<VerifyOutcome> {
    assert!(p >= 1.0);
    assert_eq!(x.len(), g.n());
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ConstantInput);
    }
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }

    // Normalize in S_{p,μ}; eigenpairs are scale-invariant.
    let norm = x
        .iter()
        .zip(g.mu())
        .map(|(&v, &m)| m * pow_abs(v, p))
        .sum::<f64>()
        .powf(1.0 / p);
    let xn: Vec<f64> = x.iter().map(|&v| v / norm).collect();
    let phi = phi_p(&xn, p);
    let n = g.n();

    // Fixed targets (p > 1 everywhere; p = 1 only where x_v ≠ 0) and the
    // half-width of the admissible interval at zero coordinates.
    let target: Vec<f64> = (0..n).map(|v| lambda * g.mu()[v] * phi[v]).collect();
    let slack: Vec<f64> = (0..n)
        .map(|v| {
            if p == 1.0 && xn[v] == 0.0 {
                (lambda * g.mu()[v]).abs()
            } else {
                0.0
            }
        })
        .collect();
    let clip_residual = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|v| {
                let d = a[v] - target[v];
                if d > slack[v] {
                    d - slack[v]
                } else if d < -slack[v] {
                    d + slack[v]
                } else {
                    0.0
                }
            })
            .collect()
    };

    struct Term {
        edge: usize,
        coeff: f64,
        x_local: Vec<f64>,
        y: Vec<f64>,
    }
    let mut terms = Vec::new();
    let mut witnesses = Vec::with_capacity(g.edges().len());
    for (i, e) in g.edges().iter().enumerate() {
        let xl = e.restrict(&xn);
        let f = lovasz(e.weight(), &xl);
        let y0 = subgradient(e.weight(), &xl).coords;
        witnesses.push(BasePoint::new(i, y0.clone()));
        let coeff = if p == 1.0 {
            e.theta()
        } else if f > 0.0 {
            e.theta() * f.powf(p - 1.0)
        } else {
            continue; // term vanishes for any selection
        };
        terms.push(Term {
            edge: i,
            coeff,
            x_local: xl,
            y: y0,
        });
    }

    let mut total = vec![0.0; n];
    for t in &terms {
        let members = g.edges()[t.edge].members();
        for (j, &v) in members.iter().enumerate() {
            total[v] += t.coeff * t.y[j];
        }
    }

    let mut residual_norm = f64::INFINITY;
    for _ in 0..FW_MAX_ITER {
        let r = clip_residual(&total);
        residual_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if residual_norm <= eps {
            break;
        }
        // Linear oracle per face, then a joint exact/backtracking step.
        let mut dir = vec![0.0; n];
        let mut proposals = Vec::with_capacity(terms.len());
        for t in &terms {
            let members = g.edges()[t.edge].members();
            let r_local: Vec<f64> = members.iter().map(|&v| r[v]).collect();
            let s = face_subgradient(g.edges()[t.edge].weight(), &t.x_local, &r_local);
            for (j, &v) in members.iter().enumerate() {
                dir[v] += t.coeff * (s[j] - t.y[j]);
            }
            proposals.push(s);
        }
        let gap = -r.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
        if gap <= 1e-14 + 1e-12 * residual_norm * residual_norm {
            break; // at the face minimum
        }
        let dd: f64 = dir.iter().map(|v| v * v).sum();
        if dd <= 0.0 {
            break;
        }
        let mut step = (gap / dd).clamp(0.0, 1.0);
        let obj = residual_norm * residual_norm;
        loop {
            let trial: Vec<f64> = (0..n).map(|v| total[v] + step * dir[v]).collect();
            let rt = clip_residual(&trial);
            let obj_t: f64 = rt.iter().map(|v| v * v).sum();
            if obj_t < obj || step < 1e-16 {
                total = trial;
                break;
            }
            step *= 0.5;
        }
        if step < 1e-16 {
            break;
        }
        for (t, s) in terms.iter_mut().zip(proposals) {
            for j in 0..t.y.len() {
                t.y[j] += step * (s[j] - t.y[j]);
            }
        }
    }

    for t in &terms {
        witnesses[t.edge] = BasePoint::new(t.edge, t.y.clone());
    }

    if residual_norm <= eps {
        Ok(VerifyOutcome::Accepted(EigenpairCertificate {
            lambda,
            p,
            residual: residual_norm,
            x: xn,
            witnesses,
        }))
    } else {
        Ok(VerifyOutcome::Rejected(Rejection {
            residual: residual_norm,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;

    #[test]
    fn phi_examples() {
        assert_eq!(phi_p(&[2.0, -3.0, 0.0], 2.0), vec![2.0, -3.0, 0.0]);
        assert_eq!(phi_p(&[2.0, -3.0, 0.0], 1.0), vec![1.0, -1.0, 0.0]);
        assert_eq!(phi_p(&[2.0, -1.0, 0.0], 3.0), vec![4.0, -1.0, 0.0]);
    }

    #[test]
    fn q_p_examples() {
        let h1 = fixtures::single_homogeneous(3);
        assert_eq!(q_p(&h1, &[1.0, 0.0, -1.0], 2.0), 4.0);
        assert_eq!(q_p(&h1, &[5.0, 5.0, 5.0], 3.0), 0.0);
        let p4 = fixtures::path(4);
        assert_eq!(q_p(&p4, &[1.0, 1.0, -1.0, -1.0], 1.0), 2.0);
    }

    #[test]
    fn apply_laplacian_examples() {
        let p2 = fixtures::path(2);
        assert_eq!(apply_laplacian(&p2, &[1.0, -1.0], 2.0), vec![2.0, -2.0]);
        let h1 = fixtures::single_homogeneous(3);
        assert_eq!(apply_laplacian(&h1, &[2.0, 2.0, 2.0], 2.0), vec![0.0; 3]);
        assert_eq!(apply_laplacian(&h1, &[3.0, 1.0, 0.0], 1.0), vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn laplacian_quadratic_identity() {
        let p4 = fixtures::path(4);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let x = [0.3, -1.2, 0.7, 2.0];
            let lap = apply_laplacian(&p4, &x, p);
            let ip: f64 = x.iter().zip(&lap).map(|(a, b)| a * b).sum();
            assert!((ip - q_p(&p4, &x, p)).abs() < 1e-12, "p = {p}");
            let ones: f64 = lap.iter().sum();
            assert!(ones.abs() < 1e-12);
        }
    }

    #[test]
    fn z_p_mu_examples() {
        let (c, v) = z_p_mu(&[3.0, 1.0, 0.0], &[1.0, 1.0, 1.0], 1.0);
        assert_eq!((c, v), (1.0, 3.0));
        let (c, v) = z_p_mu(&[1.0, -1.0], &[1.0, 1.0], 2.0);
        assert_eq!((c, v), (0.0, 2.0));
        let (_, v) = z_p_mu(&[4.0, 4.0], &[1.0, 3.0], 3.0);
        assert!(v.abs() < 1e-12);
        // general p agrees with a grid scan
        let x = [0.0, 1.0, 2.5, -0.5];
        let mu = [1.0, 2.0, 1.0, 3.0];
        let (c_star, v_star) = z_p_mu(&x, &mu, 1.7);
        for step in 0..=300 {
            let c = -1.0 + step as f64 * 0.015;
            let v: f64 = x
                .iter()
                .zip(&mu)
                .map(|(&xv, &m)| m * (xv - c).abs().powf(1.7))
                .sum();
            assert!(v >= v_star - 1e-9, "c = {c}, {v} < {v_star}");
        }
        assert!(c_star.is_finite());
    }

    #[test]
    fn rayleigh_examples() {
        let p4 = fixtures::path(4);
        let ind = [1.0, 1.0, 0.0, 0.0];
        let r = rayleigh(&p4, &ind, 1.0).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15);
        assert!((r - p4.conductance(&[0, 1]).unwrap()).abs() < 1e-15);

        let p2 = fixtures::path(2);
        assert_eq!(rayleigh(&p2, &[1.0, -1.0], 2.0).unwrap(), 2.0);

        assert!(matches!(
            rayleigh(&p4, &[2.0; 4], 1.0),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn rayleigh_shift_scale_invariance() {
        let p4 = fixtures::path(4);
        let x = [0.3, -1.2, 0.7, 2.0];
        for p in [1.0, 2.0, 2.5] {
            let base = rayleigh(&p4, &x, p).unwrap();
            let moved: Vec<f64> = x.iter().map(|&v| 3.0 * v + 7.0).collect();
            let shifted = rayleigh(&p4, &moved, p).unwrap();
            assert!((base - shifted).abs() < 1e-12 * base.max(1.0), "p = {p}");
        }
    }

    #[test]
    fn mu_split_examples() {
        let x = [2.0, 0.0, -1.0];
        let mu = [1.0, 2.0, 3.0];
        assert_eq!(mu_split(&x, &mu, 1.0), (1.0, 2.0, 3.0));
        assert_eq!(mu_split(&x, &mu, 2.0), (2.0, 2.0, 3.0));
        assert_eq!(mu_split(&[5.0, 5.0], &[1.0, 1.0], 2.0), (10.0, 0.0, 0.0));
    }

    #[test]
    fn nodal_domain_examples() {
        let p4 = fixtures::path(4);
        let d = nodal_domains(&p4, &[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(d.strong_count(), 2);
        assert_eq!(d.weak_count(), 2);
        assert_eq!(d.strong_pos, vec![vec![0, 1]]);

        let d = nodal_domains(&p4, &[1.0, -1.0, 1.0, -1.0]);
        assert_eq!(d.strong_count(), 4);

        let d = nodal_domains(&p4, &[1.0; 4]);
        assert_eq!(d.weak_pos.len(), 1);
        assert_eq!(d.weak_neg.len(), 0);
        assert_eq!(d.strong_count(), 1);
    }

    #[test]
    fn verify_p2_eigenpair() {
        let p2 = fixtures::path(2);
        let s = 1.0 / 2.0f64.sqrt();
        let out = verify_eigenpair(&p2, &[s, -s], 2.0, 2.0, 1e-9).unwrap();
        assert!(out.is_accepted(), "residual {}", out.residual());

        let out = verify_eigenpair(&p2, &[s, -s], 1.0, 2.0, 1e-9).unwrap();
        assert!(!out.is_accepted());
        assert!((out.residual() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn verify_constant_zero_eigenpair() {
        for g in [
            fixtures::path(4),
            fixtures::single_homogeneous(3),
            fixtures::triangle(),
        ] {
            for p in [1.0, 2.0, 3.0] {
                let ones = vec![1.0; g.n()];
                let out = verify_eigenpair(&g, &ones, 0.0, p, 1e-9).unwrap();
                assert!(out.is_accepted(), "p = {p}");
            }
        }
    }

    #[test]
    fn verify_rejects_zero_for_nonconstant() {
        let p4 = fixtures::path(4);
        let out = verify_eigenpair(&p4, &[0.9, -0.3, 0.1, -0.7], 0.0, 2.0, 1e-6).unwrap();
        assert!(!out.is_accepted());
        let out = verify_eigenpair(&p4, &[0.9, -0.3, 0.1, -0.7], 0.0, 1.0, 1e-6).unwrap();
        assert!(!out.is_accepted());
    }

    #[test]
    fn verify_residual_scale_invariant() {
        let p4 = fixtures::path(4);
        let x = [0.9, -0.3, 0.1, -0.7];
        let r1 = verify_eigenpair(&p4, &x, 0.4, 2.0, 1e-9)
            .unwrap()
            .residual();
        let scaled: Vec<f64> = x.iter().map(|&v| 5.0 * v).collect();
        let r2 = verify_eigenpair(&p4, &scaled, 0.4, 2.0, 1e-9)
            .unwrap()
            .residual();
        assert!((r1 - r2).abs() < 1e-10);
    }

    #[test]
    fn verify_disconnected_errors() {
        let merged = fixtures::merged_pair_edge();
        let out = verify_eigenpair(&merged, &[1.0, -1.0, 0.5, -0.5], 0.1, 2.0, 1e-6);
        assert!(matches!(out, Err(Error::NotConnected)));
    }
}
