//! Inverse power method for minimizing `𝓡₁`, with two interchangeable inner
//! solvers for `argmin_{‖z‖≤1} Q₁(z) − λ̂⟨z, g⟩`: random coordinate descent on
//! the dual ℓ₂ projection problem, and exhaustive set-function minimization
//! for the ℓ∞ ball.

use crate::error::{Error, Result};
use crate::hypergraph::SubmodularHypergraph;
use crate::laplacian::{mu_split, q_p, rayleigh, weighted_median, z_p_mu};
use crate::submodular::{min_norm_shifted, BasePoint};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Exhaustive inner-SFM cap (2^n subsets).
pub const SFM_CAP: usize = 24;

/// Relative residual below which the dual absorbs `λ̂g` and the primal map
/// `z = (λ̂g − Σy)/‖λ̂g − Σy‖` stops carrying information.
const DEGENERATE_REL: f64 = 1e-6;
/// Looser cutoff applied when coordinate descent stagnates: at this residual
/// scale the mapped gap is dominated by float noise.
const ILL_CONDITIONED_REL: f64 = 1e-3;

/// Step-2 auxiliary vector of the outer loop: `g_v = sgn(x_v)·μ_v` on the
/// support, balanced on the zero set so that `⟨1, g⟩ = 0` and
/// `⟨x, g⟩ = ‖x‖_{ℓ1,μ}`. Requires a median-centered `x`.
pub fn compute_g(x: &[f64], mu: &[f64]) -> Vec<f64> {
    let (plus, zero, minus) = mu_split(x, mu, 1.0);
    let zero_coeff = if zero > 0.0 {
        -(plus - minus) / zero
    } else {
        0.0
    };
    x.iter()
        .zip(mu)
        .map(|(&v, &m)| {
            if v > 0.0 {
                m
            } else if v < 0.0 {
                -m
            } else {
                zero_coeff * m
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RcdmOptions {
    /// Stop when the epoch-over-epoch objective decrease falls below this
    /// fraction of the current objective.
    pub eps_rel: f64,
    /// Stop when the primal-dual gap reaches this value.
    pub gap_tol: f64,
    pub max_epochs: usize,
}

impl Default for RcdmOptions {
    fn default() -> Self {
        RcdmOptions {
            eps_rel: 1e-12,
            gap_tol: 5e-7,
            max_epochs: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RcdmOutcome {
    pub z: Vec<f64>,
    pub dual: Vec<BasePoint>,
    /// `‖λ̂g − Σ y_e‖₂` vanished: the primal map is undefined.
    pub degenerate: bool,
    pub epochs: usize,
    /// Terminal primal-dual gap `(Q₁(z) − λ̂⟨z,g⟩) + ‖Σy_e − λ̂g‖₂`.
    pub gap: f64,
}

/// Random coordinate descent on `min ‖Σ_e y_e − λ̂g‖₂²` over `y_e ∈ ϑ_e B_e`:
/// one hyperedge is resampled uniformly per step and its block is replaced by
/// the exact projection. The primal vector is recovered through
/// `z = (λ̂g − Σ y_e)/‖λ̂g − Σ y_e‖₂`.
pub fn inner_rcdm(
    g: &SubmodularHypergraph,
    lambda_hat: f64,
    grad: &[f64],
    opts: &RcdmOptions,
    rng: &mut ChaCha8Rng,
) -> Result<RcdmOutcome> {
    let n = g.n();
    let m = g.edges().len();
    let target: Vec<f64> = grad.iter().map(|&v| lambda_hat * v).collect();
    let scale = target.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let mut blocks: Vec<Vec<f64>> = g.edges().iter().map(|e| vec![0.0; e.arity()]).collect();
    let mut total = vec![0.0; n];

    let outcome = |blocks: &[Vec<f64>],
                   total: &[f64],
                   epochs: usize,
                   degenerate_at: f64|
     -> Result<RcdmOutcome> {
        let diff: Vec<f64> = (0..n).map(|v| target[v] - total[v]).collect();
        let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dual: Vec<BasePoint> = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| BasePoint::new(i, b.clone()))
            .collect();
        if norm < degenerate_at {
            return Ok(RcdmOutcome {
                z: vec![0.0; n],
                dual,
                degenerate: true,
                epochs,
                gap: 0.0,
            });
        }
        let z: Vec<f64> = diff.iter().map(|v| v / norm).collect();
        let primal = q_p(g, &z, 1.0)
            - lambda_hat * z.iter().zip(grad).map(|(a, b)| a * b).sum::<f64>();
        Ok(RcdmOutcome {
            z,
            dual,
            degenerate: false,
            epochs,
            gap: primal + norm,
        })
    };

    let hard_cut = DEGENERATE_REL * scale;
    if m == 0 {
        return outcome(&blocks, &total, 0, hard_cut);
    }

    let mut prev_obj: f64 = (0..n).map(|v| (total[v] - target[v]).powi(2)).sum();
    let mut stagnant = 0usize;
    for epoch in 1..=opts.max_epochs {
        for _ in 0..m {
            let idx = rng.gen_range(0..m);
            let e = &g.edges()[idx];
            let a: Vec<f64> = e
                .members()
                .iter()
                .enumerate()
                .map(|(j, &v)| total[v] - blocks[idx][j] - target[v])
                .collect();
            let y = min_norm_shifted(e.weight(), e.theta(), &a)?;
            for (j, &v) in e.members().iter().enumerate() {
                total[v] += y.coords[j] - blocks[idx][j];
            }
            blocks[idx] = y.coords;
        }
        let obj: f64 = (0..n).map(|v| (total[v] - target[v]).powi(2)).sum();
        let out = outcome(&blocks, &total, epoch, hard_cut)?;
        if out.degenerate || out.gap <= opts.gap_tol {
            return Ok(out);
        }
        if prev_obj - obj < opts.eps_rel * obj.max(1e-300) {
            stagnant += 1;
            if stagnant >= 50 {
                // No dual progress left; if the residual is already at noise
                // scale the primal map is meaningless, flag it degenerate.
                return outcome(&blocks, &total, epoch, ILL_CONDITIONED_REL * scale);
            }
        } else {
            stagnant = 0;
        }
        prev_obj = obj;
    }
    outcome(&blocks, &total, opts.max_epochs, hard_cut)
}

#[derive(Debug, Clone)]
pub struct SfmOutcome {
    pub z: Vec<f64>,
    pub set: Vec<usize>,
    pub mask: u64,
    pub objective: f64,
}

/// Exhaustive minimization of `S ↦ Σ_e ϑ_e w_e(S) − λ̂·g(S)`, the ℓ∞ form of
/// the inner problem. Ties prefer proper subsets (the endpoints carry no cut
/// information), then the smallest bitmask. Output is the ±1 indicator.
pub fn inner_sfm(
    g: &SubmodularHypergraph,
    lambda_hat: f64,
    grad: &[f64],
) -> Result<SfmOutcome> {
    let n = g.n();
    if n > SFM_CAP {
        return Err(Error::TooLarge { n, cap: SFM_CAP });
    }
    let full = (1u64 << n) - 1;
    let objective = |mask: u64| -> f64 {
        let cut = g.boundary_volume_with(|v| mask >> v & 1 == 1);
        let gs: f64 = (0..n)
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| grad[v])
            .sum();
        cut - lambda_hat * gs
    };
    let mut best = f64::INFINITY;
    for mask in 0..=full {
        let v = objective(mask);
        if v < best {
            best = v;
        }
    }
    let mut chosen: Option<u64> = None;
    for mask in 1..full {
        if objective(mask) == best {
            chosen = Some(mask);
            break;
        }
    }
    let mask = chosen.unwrap_or_else(|| {
        (0..=full)
            .find(|&m| objective(m) == best)
            .expect("minimum is attained")
    });
    let z: Vec<f64> = (0..n)
        .map(|v| if mask >> v & 1 == 1 { 1.0 } else { -1.0 })
        .collect();
    let set = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    Ok(SfmOutcome {
        z,
        set,
        mask,
        objective: best,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerSolver {
    Rcdm,
    Sfm,
}

#[derive(Debug, Clone)]
pub struct IpmOptions {
    pub inner: InnerSolver,
    pub eps_outer: f64,
    pub max_outer: usize,
    pub rcdm: RcdmOptions,
    pub seed: u64,
}

impl Default for IpmOptions {
    fn default() -> Self {
        IpmOptions {
            inner: InnerSolver::Rcdm,
            eps_outer: 1e-6,
            max_outer: 100,
            rcdm: RcdmOptions::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxOuter,
    /// The inner dual absorbed `λ̂g` exactly; the primal map is undefined and
    /// the current `λ̂` cannot be improved through this dual point.
    DegenerateInner,
    /// The inner problem had no negative-objective direction left.
    NoImprovement,
}

#[derive(Debug, Clone)]
pub struct IpmRun {
    pub x: Vec<f64>,
    /// `λ̂` after centering, starting with `𝓡₁(x⁰)`; nonincreasing.
    pub trace: Vec<f64>,
    /// Terminal primal-dual gap of every RCDM inner solve whose step was
    /// accepted (empty for SFM). Degenerate and no-improvement solves carry
    /// no meaningful primal map and are excluded.
    pub inner_gaps: Vec<f64>,
    pub stop: StopReason,
}

/// Inverse power method for `𝓡₁`: alternates the sign-vector linearization
/// with the inner minimization, re-centering each iterate at its weighted
/// median. The trace is monotonically nonincreasing; iterates that cannot
/// strictly improve the quotient terminate the loop.
pub fn ipm(g: &SubmodularHypergraph, x0: &[f64], opts: &IpmOptions) -> Result<IpmRun> {
    assert_eq!(x0.len(), g.n());
    let mu = g.mu();
    let (c0, _) = z_p_mu(x0, mu, 1.0);
    let mut x: Vec<f64> = x0.iter().map(|&v| v - c0).collect();
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::ConstantInput);
    }
    let mut lambda_hat = rayleigh(g, &x, 1.0)?;
    let mut trace = vec![lambda_hat];
    let mut inner_gaps = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    for _ in 0..opts.max_outer {
        let grad = compute_g(&x, mu);
        let (z, gap) = match opts.inner {
            InnerSolver::Rcdm => {
                let out = inner_rcdm(g, lambda_hat, &grad, &opts.rcdm, &mut rng)?;
                if out.degenerate {
                    return Ok(IpmRun {
                        x,
                        trace,
                        inner_gaps,
                        stop: StopReason::DegenerateInner,
                    });
                }
                (out.z, Some(out.gap))
            }
            InnerSolver::Sfm => (inner_sfm(g, lambda_hat, &grad)?.z, None),
        };
        let primal =
            q_p(g, &z, 1.0) - lambda_hat * z.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
        if primal >= -1e-14 {
            return Ok(IpmRun {
                x,
                trace,
                inner_gaps,
                stop: StopReason::NoImprovement,
            });
        }
        if let Some(gap) = gap {
            inner_gaps.push(gap);
        }
        let c = weighted_median(&z, mu);
        let next: Vec<f64> = z.iter().map(|&v| v - c).collect();
        if next.windows(2).all(|w| w[0] == w[1]) {
            return Ok(IpmRun {
                x,
                trace,
                inner_gaps,
                stop: StopReason::NoImprovement,
            });
        }
        let lambda_next = rayleigh(g, &next, 1.0)?;
        x = next;
        trace.push(lambda_next);
        let rel = if lambda_hat > 0.0 {
            (lambda_hat - lambda_next).abs() / lambda_hat
        } else {
            0.0
        };
        lambda_hat = lambda_next;
        if rel < opts.eps_outer {
            return Ok(IpmRun {
                x,
                trace,
                inner_gaps,
                stop: StopReason::Converged,
            });
        }
    }
    Ok(IpmRun {
        x,
        trace,
        inner_gaps,
        stop: StopReason::MaxOuter,
    })
}

/// Best-conductance threshold cut of a vertex embedding.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCutResult {
    pub theta: f64,
    /// The side `{v : x_v > θ*}`, sorted.
    pub side: Vec<usize>,
    pub conductance: f64,
    /// `p·τ^{(p-1)/p}·𝓡_p(x)^{1/p}`, which upper-bounds the conductance when
    /// `x` is median-centered.
    pub bound: f64,
}

/// Evaluates the conductance of `Θ(x, θ) = {v: x_v > θ}` at every distinct
/// threshold below the maximum and returns the best.
pub fn sweep_cut(g: &SubmodularHypergraph, x: &[f64], p: f64) -> Result<SweepCutResult> {
    assert_eq!(x.len(), g.n());
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::ConstantInput);
    }
    let mut values: Vec<f64> = x.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let total = g.total_volume();
    let mut best = f64::INFINITY;
    let mut best_theta = values[0];
    for &theta in &values[..values.len() - 1] {
        let vol: f64 = (0..g.n())
            .filter(|&v| x[v] > theta)
            .map(|v| g.mu()[v])
            .sum();
        let c = g.boundary_volume_with(|v| x[v] > theta) / vol.min(total - vol);
        if c < best {
            best = c;
            best_theta = theta;
        }
    }
    let r = rayleigh(g, x, p)?;
    let tau = g.tau();
    let bound = p * tau.powf((p - 1.0) / p) * r.powf(1.0 / p);
    Ok(SweepCutResult {
        theta: best_theta,
        side: (0..g.n()).filter(|&v| x[v] > best_theta).collect(),
        conductance: best,
        bound,
    })
}

/// Default starting vector: the indicator of the best sweep cut of a seeded
/// random vector. Nonconstant by construction.
pub fn default_start(g: &SubmodularHypergraph, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sweep = sweep_cut(g, &v, 1.0)?;
    let mut x0 = vec![0.0; g.n()];
    for &u in &sweep.side {
        x0[u] = 1.0;
    }
    Ok(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_h2, exact_sfm, fixtures};

    #[test]
    fn compute_g_examples() {
        assert_eq!(compute_g(&[1.0, -1.0], &[1.0, 1.0]), vec![1.0, -1.0]);
        assert_eq!(
            compute_g(&[1.0, 0.0, -1.0], &[1.0, 2.0, 1.0]),
            vec![1.0, 0.0, -1.0]
        );
        assert_eq!(compute_g(&[2.0, 0.0], &[1.0, 3.0]), vec![1.0, -1.0]);
        // contracts
        let x = [0.5, 0.0, -0.25, 0.0];
        let mu = [1.0, 2.0, 3.0, 0.5];
        let g = compute_g(&x, &mu);
        let ones: f64 = g.iter().sum();
        assert!(ones.abs() < 1e-12);
        let xg: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        let l1: f64 = x.iter().zip(&mu).map(|(a, m)| m * a.abs()).sum();
        assert!((xg - l1).abs() < 1e-12);
    }

    #[test]
    fn rcdm_single_edge() {
        let p2 = fixtures::path(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // λ̂g = (2, 0): the projection clips to (1, -1), residual (1, 1).
        let out = inner_rcdm(&p2, 2.0, &[1.0, 0.0], &RcdmOptions::default(), &mut rng).unwrap();
        assert!(!out.degenerate);
        let s = 1.0 / 2.0f64.sqrt();
        assert!((out.z[0] - s).abs() < 1e-8 && (out.z[1] - s).abs() < 1e-8);
        assert!((out.dual[0].coords[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rcdm_zero_target_degenerates() {
        let p2 = fixtures::path(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = inner_rcdm(&p2, 0.0, &[1.0, -1.0], &RcdmOptions::default(), &mut rng).unwrap();
        assert!(out.degenerate);
    }

    #[test]
    fn rcdm_duality_gap_closes() {
        let p4 = fixtures::path(4);
        let x = [1.0, 1.0, -1.0, -1.0];
        let grad = compute_g(&x, p4.mu());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // λ̂ strictly above h₂ = 1/3: the inner problem has a strictly
        // negative optimum, so the primal map is well conditioned.
        let out = inner_rcdm(&p4, 0.5, &grad, &RcdmOptions::default(), &mut rng).unwrap();
        assert!(!out.degenerate);
        assert!(out.gap.abs() <= 1e-6, "gap {}", out.gap);
        // whereas at the optimum itself the dual absorbs λ̂g entirely
        let out = inner_rcdm(&p4, 1.0 / 3.0, &grad, &RcdmOptions::default(), &mut rng).unwrap();
        assert!(out.degenerate);
    }

    #[test]
    fn sfm_examples() {
        let p2 = fixtures::path(2);
        let out = inner_sfm(&p2, 2.0, &[1.0, -1.0]).unwrap();
        assert_eq!(out.set, vec![0]);
        assert_eq!(out.z, vec![1.0, -1.0]);
        assert_eq!(out.objective, -1.0);

        // λ̂ = 0: nothing beats the empty set.
        let out = inner_sfm(&p2, 0.0, &[1.0, -1.0]).unwrap();
        assert_eq!(out.mask, 0);
        assert_eq!(out.objective, 0.0);

        // P4 with the centered indicator's g: ties with ∅ resolve to {0, 1}.
        let p4 = fixtures::path(4);
        let grad = compute_g(&[1.0, 1.0, 0.0, 0.0], p4.mu());
        assert_eq!(grad, vec![1.0, 2.0, -2.0, -1.0]);
        let out = inner_sfm(&p4, 1.0 / 3.0, &grad).unwrap();
        assert_eq!(out.set, vec![0, 1]);
    }

    #[test]
    fn sfm_matches_exhaustive_oracle() {
        let p4 = fixtures::path(4);
        let grad = compute_g(&[0.5, -0.25, 0.25, -0.5], p4.mu());
        for lh in [0.0, 0.2, 1.0 / 3.0, 0.9] {
            let fast = inner_sfm(&p4, lh, &grad).unwrap();
            let (v, _) = exact_sfm(
                |mask| {
                    p4.boundary_volume_with(|v| mask >> v & 1 == 1)
                        - lh * (0..4)
                            .filter(|&v| mask >> v & 1 == 1)
                            .map(|v| grad[v])
                            .sum::<f64>()
                },
                4,
            )
            .unwrap();
            assert!((fast.objective - v).abs() < 1e-15, "lambda {lh}");
        }
    }

    #[test]
    fn ipm_on_p4_hits_h2() {
        let p4 = fixtures::path(4);
        for inner in [InnerSolver::Rcdm, InnerSolver::Sfm] {
            let opts = IpmOptions {
                inner,
                ..Default::default()
            };
            let run = ipm(&p4, &[1.0, 1.0, -1.0, -1.0], &opts).unwrap();
            assert!(run.trace.len() <= 3, "trace {:?}", run.trace);
            for &l in &run.trace {
                assert!((l - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ipm_on_p2() {
        let p2 = fixtures::path(2);
        let run = ipm(&p2, &[1.0, -1.0], &IpmOptions::default()).unwrap();
        let (h2, _) = exact_h2(&p2).unwrap();
        assert!((run.trace.last().unwrap() - h2).abs() < 1e-9);
        assert_eq!(h2, 1.0);
    }

    #[test]
    fn ipm_rejects_constant() {
        let p4 = fixtures::path(4);
        assert!(matches!(
            ipm(&p4, &[1.0; 4], &IpmOptions::default()),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn sweep_cut_examples() {
        let p4 = fixtures::path(4);
        let r = sweep_cut(&p4, &[0.9, 0.8, -0.7, -1.0], 1.0).unwrap();
        assert_eq!(r.side, vec![0, 1]);
        assert!((r.conductance - 1.0 / 3.0).abs() < 1e-15);

        let p2 = fixtures::path(2);
        let r = sweep_cut(&p2, &[1.0, -1.0], 1.0).unwrap();
        assert_eq!(r.conductance, 1.0);
        assert!((r.bound - 1.0).abs() < 1e-12);

        assert!(matches!(
            sweep_cut(&p4, &[3.0; 4], 1.0),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn sweep_recovers_indicator_cut() {
        let p4 = fixtures::path(4);
        let x = [1.0, 1.0, 0.0, 0.0];
        let r = sweep_cut(&p4, &x, 1.0).unwrap();
        assert!(r.conductance <= p4.conductance(&[0, 1]).unwrap() + 1e-15);
    }
}
