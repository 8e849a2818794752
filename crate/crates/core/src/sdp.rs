//! SDP relaxation for minimizing `𝓡₂`: per-edge extreme-point constraints on
//! vertex embeddings, a first-order solver on the full-rank factorized
//! program, and Gaussian rounding back to a vertex vector.
//!
//! The relaxation minimizes `Σ_e ϑ_e·max_{y ∈ 𝓔(B_e)} ‖Xy‖²` over embeddings
//! with `Σ_v μ_v ‖x'_v‖² = 1` and `Σ_v μ_v x'_v = 0`. Both constraints are
//! maintained by centering and rescaling, which the objective's homogeneity
//! makes exact; the per-edge max is annealed through a log-sum-exp smoothing.

use crate::error::{Error, Result};
use crate::hypergraph::SubmodularHypergraph;
use crate::laplacian::rayleigh;
use crate::submodular::extreme_points;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

struct SdpEdge {
    members: Vec<usize>,
    theta: f64,
    points: Vec<Vec<f64>>,
}

/// The materialized relaxation: per-edge extreme points of the unscaled base
/// polytopes, with `ϑ_e` carried in the objective.
pub struct SdpProblem {
    n: usize,
    n_embed: usize,
    mu: Vec<f64>,
    edges: Vec<SdpEdge>,
}

impl SdpProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_embed(&self) -> usize {
        self.n_embed
    }

    /// Extreme points per edge, in edge order.
    pub fn point_counts(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.points.len()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SdpSolution {
    /// One embedding vector (length `n_embed`) per vertex.
    pub embedding: Vec<Vec<f64>>,
    /// Per-edge slack `η_e = max_y ‖Xy‖`.
    pub eta: Vec<f64>,
    /// `Σ_e ϑ_e η_e²`.
    pub objective: f64,
}

/// Enumerates every base-polytope extreme point (caps `ζ(E) ≤ 8`).
pub fn build_sdp(g: &SubmodularHypergraph, n_embed: usize) -> Result<SdpProblem> {
    let zeta = g.edges().iter().map(|e| e.arity()).max().unwrap_or(0);
    if n_embed < zeta.max(1) {
        return Err(Error::Config(format!(
            "embedding dimension {n_embed} is below the largest hyperedge size {zeta}"
        )));
    }
    let mut edges = Vec::with_capacity(g.edges().len());
    for e in g.edges() {
        let pts = extreme_points(e.weight())?;
        edges.push(SdpEdge {
            members: e.members().to_vec(),
            theta: e.theta(),
            points: pts.into_iter().map(|p| p.coords).collect(),
        });
    }
    Ok(SdpProblem {
        n: g.n(),
        n_embed,
        mu: g.mu().to_vec(),
        edges,
    })
}

fn center_columns(x: &mut DMatrix<f64>, mu: &[f64]) {
    let total: f64 = mu.iter().sum();
    let d = x.nrows();
    for r in 0..d {
        let mean: f64 = (0..x.ncols()).map(|c| mu[c] * x[(r, c)]).sum::<f64>() / total;
        for c in 0..x.ncols() {
            x[(r, c)] -= mean;
        }
    }
}

fn weighted_norm2(x: &DMatrix<f64>, mu: &[f64]) -> f64 {
    (0..x.ncols())
        .map(|c| mu[c] * x.column(c).norm_squared())
        .sum()
}

fn project(x: &mut DMatrix<f64>, mu: &[f64]) {
    center_columns(x, mu);
    let q = weighted_norm2(x, mu);
    if q > 0.0 {
        *x /= q.sqrt();
    }
}

/// `Xy` for a sparse extreme point supported on the edge members.
fn apply_point(x: &DMatrix<f64>, members: &[usize], point: &[f64]) -> nalgebra::DVector<f64> {
    let mut v = nalgebra::DVector::zeros(x.nrows());
    for (j, &col) in members.iter().enumerate() {
        if point[j] != 0.0 {
            v.axpy(point[j], &x.column(col).into_owned(), 1.0);
        }
    }
    v
}

fn smoothed_objective(
    x: &DMatrix<f64>,
    edges: &[SdpEdge],
    beta: f64,
    grad: Option<&mut DMatrix<f64>>,
) -> f64 {
    let mut total = 0.0;
    let mut grad = grad;
    if let Some(gm) = grad.as_deref_mut() {
        gm.fill(0.0);
    }
    for e in edges {
        let images: Vec<nalgebra::DVector<f64>> = e
            .points
            .iter()
            .map(|p| apply_point(x, &e.members, p))
            .collect();
        let s: Vec<f64> = images.iter().map(|v| v.norm_squared()).collect();
        let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = s.iter().map(|&v| ((v - m) * beta).exp()).collect();
        let z: f64 = weights.iter().sum();
        total += e.theta * (m + (z.ln()) / beta);
        if let Some(gm) = grad.as_deref_mut() {
            for ((p, img), &wgt) in e.points.iter().zip(&images).zip(&weights) {
                let coef = 2.0 * e.theta * wgt / z;
                for (j, &col) in e.members.iter().enumerate() {
                    if p[j] != 0.0 {
                        for r in 0..x.nrows() {
                            gm[(r, col)] += coef * p[j] * img[r];
                        }
                    }
                }
            }
        }
    }
    total
}

fn exact_objective(x: &DMatrix<f64>, edges: &[SdpEdge]) -> (f64, Vec<f64>) {
    let mut total = 0.0;
    let mut eta = Vec::with_capacity(edges.len());
    for e in edges {
        let worst = e
            .points
            .iter()
            .map(|p| apply_point(x, &e.members, p).norm_squared())
            .fold(0.0f64, f64::max);
        eta.push(worst.sqrt());
        total += e.theta * worst;
    }
    (total, eta)
}

/// Solves the factorized relaxation to relative tolerance `tol` by annealed
/// smoothed gradient descent with backtracking; feasibility is exact at every
/// iterate.
pub fn solve_sdp(prob: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    if prob.n < 2 {
        return Err(Error::Config(
            "the relaxation needs at least two vertices".into(),
        ));
    }
    let make_solution = |x: &DMatrix<f64>| -> SdpSolution {
        let (objective, eta) = exact_objective(x, &prob.edges);
        SdpSolution {
            embedding: (0..prob.n).map(|c| x.column(c).as_slice().to_vec()).collect(),
            eta,
            objective,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5d9);
    if prob.edges.is_empty() {
        let mut x = DMatrix::from_fn(prob.n_embed, prob.n, |_, _| standard_normal(&mut rng));
        project(&mut x, &prob.mu);
        return Ok(make_solution(&x));
    }

    let betas = [32.0, 128.0, 512.0, 2048.0, 8192.0, 40000.0, 2e5, 1e6];
    let stage_tol = (tol * 0.1).max(1e-10);
    let mut best: Option<(f64, DMatrix<f64>)> = None;

    for _attempt in 0..2 {
        let mut x = DMatrix::from_fn(prob.n_embed, prob.n, |_, _| standard_normal(&mut rng));
        project(&mut x, &prob.mu);
        let mut grad_h = DMatrix::zeros(prob.n_embed, prob.n);
        let mut step = 0.05;
        for &beta in &betas {
            let mut phi = smoothed_objective(&x, &prob.edges, beta, Some(&mut grad_h));
            for _ in 0..400 {
                // ratio gradient at q = 1
                let mut grad = grad_h.clone();
                for c in 0..prob.n {
                    let coef = 2.0 * phi * prob.mu[c];
                    for r in 0..prob.n_embed {
                        grad[(r, c)] -= coef * x[(r, c)];
                    }
                }
                let gnorm2 = grad.norm_squared();
                if gnorm2 < 1e-18 {
                    break;
                }
                let mut accepted = false;
                while step > 1e-18 {
                    let mut trial = &x - &grad * step;
                    project(&mut trial, &prob.mu);
                    let h_try = smoothed_objective(&trial, &prob.edges, beta, None);
                    if h_try < phi - 1e-4 * step * gnorm2 {
                        x = trial;
                        let improvement = phi - h_try;
                        phi = smoothed_objective(&x, &prob.edges, beta, Some(&mut grad_h));
                        step = (step * 1.25).min(10.0);
                        accepted = true;
                        if improvement < stage_tol * phi.max(1e-12) {
                            accepted = false; // converged at this smoothing level
                        }
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            step = step.max(1e-6);
        }
        let (h_exact, _) = exact_objective(&x, &prob.edges);
        if !h_exact.is_finite() {
            return Err(Error::NoConvergence { iterations: 400 });
        }
        if best.as_ref().map_or(true, |(b, _)| h_exact < *b) {
            best = Some((h_exact, x));
        }
    }

    let (_, x) = best.expect("at least one attempt");
    Ok(make_solution(&x))
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on open-interval uniforms.
    let u1: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 1e-300 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// One rounding draw: `x = Xᵀ g` with `g ~ N(0, I_{n_embed})` from a seeded
/// generator.
pub fn gaussian_round(sol: &SdpSolution, seed: u64) -> Result<Vec<f64>> {
    let frob: f64 = sol
        .embedding
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>())
        .sum();
    if frob.sqrt() < 1e-12 {
        return Err(Error::DegenerateEmbedding);
    }
    let dim = sol.embedding[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss: Vec<f64> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
    Ok(sol
        .embedding
        .iter()
        .map(|col| col.iter().zip(&gauss).map(|(a, b)| a * b).sum())
        .collect())
}

/// Feasibility report for the relaxation constraints (norm, centering, and
/// every extreme-point inequality), as the largest violation.
pub fn feasibility_violation(sol: &SdpSolution, g: &SubmodularHypergraph) -> Result<f64> {
    let prob = build_sdp(g, sol.embedding[0].len())?;
    let dim = sol.embedding[0].len();
    let mut x = DMatrix::zeros(dim, g.n());
    for (c, col) in sol.embedding.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            x[(r, c)] = v;
        }
    }
    let mut worst: f64 = (weighted_norm2(&x, g.mu()) - 1.0).abs();
    let total: f64 = g.mu().iter().sum();
    for r in 0..dim {
        let mean: f64 = (0..g.n()).map(|c| g.mu()[c] * x[(r, c)]).sum::<f64>() / total;
        worst = worst.max(mean.abs());
    }
    for (e, &eta) in prob.edges.iter().zip(&sol.eta) {
        for p in &e.points {
            let v = apply_point(&x, &e.members, p).norm_squared();
            worst = worst.max(v - eta * eta);
        }
    }
    Ok(worst)
}

/// End-to-end minimization of `𝓡₂`: solve the relaxation, round with
/// `restarts` independent seeded draws, keep the best quotient. Returns the
/// μ-mean-centered winner and the relaxation objective (a lower bound on
/// `λ₂^{(2)}` up to solver tolerance).
pub fn minimize_r2(
    g: &SubmodularHypergraph,
    n_embed: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    let prob = build_sdp(g, n_embed)?;
    let sol = solve_sdp(&prob, 1e-4)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..restarts.max(1) {
        let draw_seed = seed.wrapping_add((r as u64).wrapping_mul(0x9e3779b97f4a7c15));
        let x = gaussian_round(&sol, draw_seed)?;
        match rayleigh(g, &x, 2.0) {
            Ok(r2) => {
                if best.as_ref().map_or(true, |(b, _)| r2 < *b) {
                    best = Some((r2, x));
                }
            }
            Err(Error::ConstantInput) => continue,
            Err(e) => return Err(e),
        }
    }
    let (_, x) = best.ok_or(Error::DegenerateEmbedding)?;
    let total: f64 = g.mu().iter().sum();
    let mean: f64 = x.iter().zip(g.mu()).map(|(v, m)| v * m).sum::<f64>() / total;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    Ok((centered, sol.objective))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hyperedge;
    use crate::oracle::fixtures;
    use crate::submodular::CutWeightFn;

    #[test]
    fn build_counts() {
        let prob = build_sdp(&fixtures::path(2), 2).unwrap();
        assert_eq!(prob.point_counts(), vec![2]);
        let prob = build_sdp(&fixtures::single_homogeneous(3), 3).unwrap();
        assert_eq!(prob.point_counts(), vec![6]);
        let big = fixtures::single_homogeneous(9);
        assert!(matches!(
            build_sdp(&big, 9),
            Err(Error::ArityTooLarge { arity: 9, cap: 8 })
        ));
    }

    #[test]
    fn p2_objective_exact() {
        let p2 = fixtures::path(2);
        let prob = build_sdp(&p2, 2).unwrap();
        let sol = solve_sdp(&prob, 1e-4).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-3, "got {}", sol.objective);
        assert!(feasibility_violation(&sol, &p2).unwrap() < 1e-6);
        let (x, opt) = minimize_r2(&p2, 2, 8, 7).unwrap();
        assert!((opt - 2.0).abs() < 1e-3);
        let r2 = rayleigh(&p2, &x, 2.0).unwrap();
        assert!((r2 - 2.0).abs() < 1e-6);
    }

    #[test]
    fn zero_edges_zero_objective() {
        let g = SubmodularHypergraph::new(2, vec![1.0, 1.0], vec![]).unwrap();
        let prob = build_sdp(&g, 2).unwrap();
        let sol = solve_sdp(&prob, 1e-4).unwrap();
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn h1_relaxation_lower_bounds_r2() {
        let h1 = fixtures::single_homogeneous(3);
        let prob = build_sdp(&h1, 3).unwrap();
        let sol = solve_sdp(&prob, 1e-4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let mut x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = x.iter().sum::<f64>() / 3.0;
            x.iter_mut().for_each(|v| *v -= mean);
            if x.iter().all(|v| v.abs() < 1e-9) {
                continue;
            }
            let r2 = rayleigh(&h1, &x, 2.0).unwrap();
            assert!(sol.objective <= r2 + 1e-4, "{} > {}", sol.objective, r2);
        }
        // the equilateral embedding achieves 1, strictly below min 𝓡₂ = 2
        assert!((sol.objective - 1.0).abs() < 2e-3, "got {}", sol.objective);
    }

    #[test]
    fn rounding_reproducible() {
        let h1 = fixtures::single_homogeneous(3);
        let sol = solve_sdp(&build_sdp(&h1, 3).unwrap(), 1e-4).unwrap();
        let a = gaussian_round(&sol, 42).unwrap();
        let b = gaussian_round(&sol, 42).unwrap();
        assert_eq!(a, b);
        let c = gaussian_round(&sol, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_embedding_detected() {
        let sol = SdpSolution {
            embedding: vec![vec![0.0, 0.0]; 2],
            eta: vec![],
            objective: 0.0,
        };
        assert!(matches!(
            gaussian_round(&sol, 1),
            Err(Error::DegenerateEmbedding)
        ));
    }

    #[test]
    fn triangle_pipeline_matches_oracle() {
        let tri = fixtures::triangle();
        let (x, _opt) = minimize_r2(&tri, 3, 16, 3).unwrap();
        let sweep = crate::ipm::sweep_cut(&tri, &x, 2.0).unwrap();
        let (h2, _) = crate::oracle::exact_h2(&tri).unwrap();
        assert!((sweep.conductance - h2).abs() < 1e-12);
        assert_eq!(h2, 1.0);
    }

    #[test]
    fn embed_dim_must_cover_largest_edge() {
        let e = Hyperedge::new(vec![0, 1, 2], 1.0, CutWeightFn::homogeneous(3)).unwrap();
        let g = SubmodularHypergraph::new(3, vec![1.0; 3], vec![e]).unwrap();
        assert!(matches!(build_sdp(&g, 2), Err(Error::Config(_))));
    }
}
