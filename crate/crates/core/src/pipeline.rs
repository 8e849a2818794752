//! End-to-end runs behind the CLI and the Python bindings: clustering with
//! both IPM variants and the SDP pipeline, spectrum reports with eigenpair
//! certificates, and the self-check suites.

use crate::dataset::{clustering_error, RunReport};
use crate::error::{Error, Result};
use crate::hypergraph::SubmodularHypergraph;
use crate::ipm::{default_start, ipm, sweep_cut, InnerSolver, IpmOptions, SweepCutResult};
use crate::laplacian::{mu_split, nodal_domains, rayleigh, verify_eigenpair};
use crate::oracle::{
    dense_graph_spectrum, exact_h2, inject_merged_edge, random_instance, snap_zeros,
    InstanceSpec, RandomWeightKind,
};
use crate::sdp::minimize_r2;
use crate::submodular::{check_membership, lovasz, subgradient};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct ClusterOptions {
    pub inner: InnerSolver,
    pub eps_outer: f64,
    pub eps_inner: f64,
    pub max_outer: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub restarts: usize,
    pub with_sdp: bool,
    pub sdp_restarts: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            inner: InnerSolver::Rcdm,
            eps_outer: 1e-6,
            eps_inner: 1e-12,
            max_outer: 100,
            max_epochs: 10_000,
            seed: 0,
            restarts: 3,
            with_sdp: false,
            sdp_restarts: 32,
        }
    }
}

impl ClusterOptions {
    fn ipm_options(&self, seed: u64) -> IpmOptions {
        IpmOptions {
            inner: self.inner,
            eps_outer: self.eps_outer,
            max_outer: self.max_outer,
            rcdm: crate::ipm::RcdmOptions {
                eps_rel: self.eps_inner,
                max_epochs: self.max_epochs,
                ..Default::default()
            },
            seed,
        }
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "inner": match self.inner { InnerSolver::Rcdm => "rcdm", InnerSolver::Sfm => "sfm" },
            "eps_outer": self.eps_outer,
            "eps_inner": self.eps_inner,
            "max_outer": self.max_outer,
            "max_epochs": self.max_epochs,
            "seed": self.seed,
            "restarts": self.restarts,
        })
    }
}

/// Best-of-restarts IPM on one hypergraph; each restart starts from the
/// indicator of the best sweep cut of a fresh seeded random vector.
pub fn ipm_best_cut(
    g: &SubmodularHypergraph,
    opts: &ClusterOptions,
) -> Result<(f64, SweepCutResult)> {
    let mut best: Option<(f64, SweepCutResult)> = None;
    for r in 0..opts.restarts.max(1) {
        let seed = opts.seed.wrapping_add(r as u64);
        let x0 = default_start(g, seed)?;
        let run = ipm(g, &x0, &opts.ipm_options(seed))?;
        let sweep = sweep_cut(g, &run.x, 1.0)?;
        let lambda = *run.trace.last().unwrap();
        let better = match &best {
            None => true,
            Some((_, b)) => sweep.conductance < b.conductance,
        };
        if better {
            best = Some((lambda, sweep));
        }
    }
    Ok(best.expect("at least one restart"))
}

/// The `cluster` command: IPM on the submodular weights (IPM-S), IPM on the
/// homogenized weights (IPM-H), and optionally the SDP pipeline. One report
/// per algorithm.
pub fn cluster(
    g: &SubmodularHypergraph,
    labels: Option<&[String]>,
    opts: &ClusterOptions,
) -> Result<Vec<RunReport>> {
    let mut reports = Vec::new();
    let variants: [(&str, SubmodularHypergraph); 2] =
        [("ipm-s", g.clone()), ("ipm-h", g.homogenized())];
    for (name, graph) in &variants {
        let start = Instant::now();
        let (lambda, sweep) = ipm_best_cut(graph, opts)?;
        reports.push(make_report(
            name,
            g,
            lambda,
            &sweep,
            labels,
            start.elapsed().as_secs_f64(),
            opts,
        )?);
    }
    if opts.with_sdp {
        let start = Instant::now();
        let (x, sdp_opt) = minimize_r2(g, g.n(), opts.sdp_restarts, opts.seed)?;
        let sweep = sweep_cut(g, &x, 2.0)?;
        reports.push(make_report(
            "sdp",
            g,
            sdp_opt,
            &sweep,
            labels,
            start.elapsed().as_secs_f64(),
            opts,
        )?);
    }
    Ok(reports)
}

fn make_report(
    algorithm: &str,
    g: &SubmodularHypergraph,
    lambda: f64,
    sweep: &SweepCutResult,
    labels: Option<&[String]>,
    wall_time_s: f64,
    opts: &ClusterOptions,
) -> Result<RunReport> {
    let mut partition = vec![0u8; g.n()];
    for &v in &sweep.side {
        partition[v] = 1;
    }
    let error = match labels {
        Some(l) => {
            let side: Vec<bool> = partition.iter().map(|&b| b == 1).collect();
            Some(clustering_error(&side, l)?)
        }
        None => None,
    };
    Ok(RunReport {
        algorithm: algorithm.to_owned(),
        lambda,
        conductance: sweep.conductance,
        clustering_error: error,
        partition,
        wall_time_s,
        seed: opts.seed,
        config: opts.echo(),
    })
}

/// The `spectrum` command: eigenvalue estimates plus a certificate attempt.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub method: String,
    pub p: f64,
    /// λ̂ trace for IPM, `[sdp_opt, 𝓡₂(x*)]` for SDP, eigenvalues for dense.
    pub lambdas: Vec<f64>,
    pub x: Vec<f64>,
    pub sweep_conductance: f64,
    pub certificate: serde_json::Value,
    pub wall_time_s: f64,
}

pub fn spectrum(
    g: &SubmodularHypergraph,
    p: f64,
    method: &str,
    opts: &ClusterOptions,
) -> Result<SpectrumReport> {
    let start = Instant::now();
    let eps = 1e-6;
    let (lambdas, x, p_used) = match method {
        "ipm" => {
            if (p - 1.0).abs() > 1e-12 {
                return Err(Error::Config("the ipm method estimates p = 1".into()));
            }
            let (lambda, _) = ipm_best_cut(g, opts)?;
            let x0 = default_start(g, opts.seed)?;
            let run = ipm(g, &x0, &opts.ipm_options(opts.seed))?;
            let _ = lambda;
            (run.trace.clone(), run.x, 1.0)
        }
        "sdp" => {
            if (p - 2.0).abs() > 1e-12 {
                return Err(Error::Config("the sdp method estimates p = 2".into()));
            }
            let (x, sdp_opt) = minimize_r2(g, g.n(), opts.sdp_restarts, opts.seed)?;
            let r2 = rayleigh(g, &x, 2.0)?;
            (vec![sdp_opt, r2], x, 2.0)
        }
        "dense" => {
            if (p - 2.0).abs() > 1e-12 {
                return Err(Error::Config("the dense method solves p = 2".into()));
            }
            let spec = dense_graph_spectrum(g)?;
            let x = spec.eigenvectors[1.min(spec.eigenvectors.len() - 1)].clone();
            (spec.eigenvalues, x, 2.0)
        }
        other => {
            return Err(Error::Config(format!(
                "unknown spectrum method {other:?} (expected ipm, sdp, or dense)"
            )))
        }
    };
    let lambda_for_cert = match method {
        "dense" => lambdas.get(1).copied().unwrap_or(0.0),
        "sdp" => lambdas[1],
        _ => *lambdas.last().unwrap(),
    };
    let certificate = match verify_eigenpair(g, &x, lambda_for_cert, p_used, eps) {
        Ok(outcome) => {
            let accepted = outcome.is_accepted();
            let residual = outcome.residual();
            match outcome {
                crate::laplacian::VerifyOutcome::Accepted(cert) => {
                    json!({"accepted": accepted, "residual": residual, "certificate": cert})
                }
                _ => json!({"accepted": accepted, "residual": residual}),
            }
        }
        Err(e) => json!({"accepted": false, "error": e.to_string()}),
    };
    let sweep = sweep_cut(g, &x, p_used)?;
    Ok(SpectrumReport {
        method: method.to_owned(),
        p: p_used,
        lambdas,
        x,
        sweep_conductance: sweep.conductance,
        certificate,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// One self-check suite outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the invariant suites over seeded random instances. Available suites:
/// `lovasz`, `reduction`, `rayleigh`, `ipm`, `sweep`, `eigen` (or `all`).
pub fn verify_suites(suite: &str, seeds: std::ops::Range<u64>, max_n: usize) -> Result<Vec<SuiteReport>> {
    let names = ["lovasz", "reduction", "rayleigh", "ipm", "sweep", "eigen"];
    let selected: Vec<&str> = if suite == "all" {
        names.to_vec()
    } else if names.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Config(format!(
            "unknown suite {suite:?} (expected one of {names:?} or \"all\")"
        )));
    };
    let mut out = Vec::new();
    for name in selected {
        let report = match name {
            "lovasz" => suite_lovasz(seeds.clone()),
            "reduction" => suite_reduction(seeds.clone(), max_n),
            "rayleigh" => suite_rayleigh(seeds.clone(), max_n),
            "ipm" => suite_ipm(seeds.clone(), max_n),
            "sweep" => suite_sweep(seeds.clone(), max_n),
            "eigen" => suite_eigen(seeds.clone(), max_n),
            _ => unreachable!(),
        };
        out.push(report);
    }
    Ok(out)
}

fn small_instance(seed: u64, max_n: usize, kind: RandomWeightKind) -> SubmodularHypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37).wrapping_add(17));
    let n = rng.gen_range(3..=max_n.max(3));
    let m = rng.gen_range(n - 1..=n + 3);
    random_instance(&InstanceSpec {
        n,
        m,
        max_arity: 4.min(n),
        kind,
        seed,
    })
}

fn suite_lovasz(seeds: std::ops::Range<u64>) -> SuiteReport {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arity = rng.gen_range(2..=5usize);
        let w = crate::oracle::random_table(arity, &mut rng);
        cases += 1;
        for mask in 0..(1u64 << arity) {
            let ind: Vec<f64> = (0..arity)
                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { 0.0 })
                .collect();
            if (lovasz(&w, &ind) - w.value_of_mask(mask)).abs() > 1e-9 {
                failures.push(format!("seed {seed}: f(1_S) != F(S) at mask {mask}"));
            }
        }
        let x: Vec<f64> = (0..arity).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y = subgradient(&w, &x);
        let sum: f64 = y.coords.iter().sum();
        let ip: f64 = y.coords.iter().zip(&x).map(|(a, b)| a * b).sum();
        if sum.abs() > 1e-9 {
            failures.push(format!("seed {seed}: subgradient does not sum to zero"));
        }
        if (ip - lovasz(&w, &x)).abs() > 1e-9 {
            failures.push(format!("seed {seed}: ⟨∇f, x⟩ != f(x)"));
        }
        if !check_membership(&w, 1.0, &y.coords) {
            failures.push(format!("seed {seed}: subgradient outside base polytope"));
        }
        for c in [-2.0, -1.0, 0.5, 3.0] {
            let cx: Vec<f64> = x.iter().map(|&v| c * v).collect();
            if (lovasz(&w, &cx) - c.abs() * lovasz(&w, &x)).abs() > 1e-9 {
                failures.push(format!("seed {seed}: homogeneity fails at c = {c}"));
            }
        }
    }
    SuiteReport {
        name: "lovasz".into(),
        cases,
        failures,
    }
}

fn suite_reduction(seeds: std::ops::Range<u64>, max_n: usize) -> SuiteReport {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in seeds {
        let g = small_instance(seed, max_n.min(8), RandomWeightKind::Table);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let merged = match inject_merged_edge(&g, &mut rng) {
            Some(m) => m,
            None => continue,
        };
        cases += 1;
        let reduced = match merged.reduce() {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("seed {seed}: reduce failed: {e}"));
                continue;
            }
        };
        let n = g.n();
        for mask in 0..(1u64 << n) {
            let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if (merged.boundary_volume(&s) - reduced.boundary_volume(&s)).abs() > 1e-12 {
                failures.push(format!("seed {seed}: boundary changed at mask {mask}"));
                break;
            }
        }
    }
    SuiteReport {
        name: "reduction".into(),
        cases,
        failures,
    }
}

fn suite_rayleigh(seeds: std::ops::Range<u64>, max_n: usize) -> SuiteReport {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in seeds {
        let g = small_instance(seed, max_n, RandomWeightKind::Alpha);
        cases += 1;
        let n = g.n();
        let (h2, _) = match exact_h2(&g) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("seed {seed}: oracle failed: {e}"));
                continue;
            }
        };
        for mask in 1..(1u64 << n) - 1 {
            let ind: Vec<f64> = (0..n)
                .map(|v| if mask >> v & 1 == 1 { 1.0 } else { 0.0 })
                .collect();
            let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let r1 = rayleigh(&g, &ind, 1.0).unwrap();
            let c = g.conductance(&s).unwrap();
            if (r1 - c).abs() > 1e-12 * c.max(1.0) {
                failures.push(format!("seed {seed}: 𝓡₁(1_S) != c(S) at mask {mask}"));
                break;
            }
            if r1 < h2 - 1e-9 {
                failures.push(format!("seed {seed}: 𝓡₁ beneath h₂ at mask {mask}"));
                break;
            }
        }
    }
    SuiteReport {
        name: "rayleigh".into(),
        cases,
        failures,
    }
}

fn suite_ipm(seeds: std::ops::Range<u64>, max_n: usize) -> SuiteReport {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in seeds {
        let g = small_instance(seed, max_n, RandomWeightKind::Alpha);
        cases += 1;
        let (h2, _) = match exact_h2(&g) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("seed {seed}: oracle failed: {e}"));
                continue;
            }
        };
        for inner in [InnerSolver::Rcdm, InnerSolver::Sfm] {
            let opts = ClusterOptions {
                inner,
                seed,
                restarts: 2,
                ..Default::default()
            };
            let x0 = match default_start(&g, seed) {
                Ok(x) => x,
                Err(e) => {
                    failures.push(format!("seed {seed}: start failed: {e}"));
                    continue;
                }
            };
            let run = match ipm(&g, &x0, &opts.ipm_options(seed)) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("seed {seed}: ipm failed: {e}"));
                    continue;
                }
            };
            for w in run.trace.windows(2) {
                if w[1] > w[0] + 1e-10 {
                    failures.push(format!("seed {seed}: trace increased {} -> {}", w[0], w[1]));
                }
            }
            if run.trace.iter().any(|&l| l < h2 - 1e-9) {
                failures.push(format!("seed {seed}: λ̂ beneath h₂"));
            }
            for gap in &run.inner_gaps {
                if gap.abs() > 1e-6 {
                    failures.push(format!("seed {seed}: duality gap {gap}"));
                }
            }
        }
    }
    SuiteReport {
        name: "ipm".into(),
        cases,
        failures,
    }
}

fn suite_sweep(seeds: std::ops::Range<u64>, max_n: usize) -> SuiteReport {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in seeds {
        let g = small_instance(seed, max_n, RandomWeightKind::Table);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
        for p in [1.0, 2.0] {
            cases += 1;
            let mut x: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (c, _) = crate::laplacian::z_p_mu(&x, g.mu(), p);
            x.iter_mut().for_each(|v| *v -= c);
            if x.windows(2).all(|w| w[0] == w[1]) {
                continue;
            }
            let sweep = sweep_cut(&g, &x, p).unwrap();
            if sweep.conductance > sweep.bound + 1e-9 {
                failures.push(format!(
                    "seed {seed}, p {p}: conductance {} above bound {}",
                    sweep.conductance, sweep.bound
                ));
            }
        }
    }
    SuiteReport {
        name: "sweep".into(),
        cases,
        failures,
    }
}

fn suite_eigen(seeds: std::ops::Range<u64>, max_n: usize) -> SuiteReport {
    let mut failures = Vec::new();
    let mut cases = 0;
    for seed in seeds {
        let g = small_instance(seed, max_n, RandomWeightKind::Homogeneous);
        // keep only 2-uniform instances
        if g.edges().iter().any(|e| e.arity() != 2) {
            continue;
        }
        cases += 1;
        let spec = match dense_graph_spectrum(&g) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("seed {seed}: spectrum failed: {e}"));
                continue;
            }
        };
        let lambda2 = spec.eigenvalues[1];
        let x2 = snap_zeros(&spec.eigenvectors[1], 1e-10);
        match verify_eigenpair(&g, &x2, lambda2, 2.0, 1e-8) {
            Ok(out) if out.is_accepted() => {}
            Ok(out) => failures.push(format!(
                "seed {seed}: λ₂ eigenpair rejected, residual {}",
                out.residual()
            )),
            Err(e) => failures.push(format!("seed {seed}: verify failed: {e}")),
        }
        let (h2, _) = exact_h2(&g).unwrap();
        let tau = g.tau();
        if !((2.0 / tau) * (h2 / 2.0) * (h2 / 2.0) <= lambda2 + 1e-9 && lambda2 <= 2.0 * h2 + 1e-9)
        {
            failures.push(format!("seed {seed}: Cheeger sandwich fails"));
        }
        let domains = nodal_domains(&g, &x2);
        if domains.weak_count() != 2 {
            failures.push(format!(
                "seed {seed}: λ₂ eigenvector has {} weak domains",
                domains.weak_count()
            ));
        }
        let (mp, _, mm) = mu_split(&x2, g.mu(), 2.0);
        if (mp - mm).abs() > 1e-6 {
            failures.push(format!("seed {seed}: median property fails"));
        }
    }
    SuiteReport {
        name: "eigen".into(),
        cases,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;

    #[test]
    fn cluster_p4_fixture() {
        let p4 = fixtures::path(4);
        let labels: Vec<String> = ["a", "a", "b", "b"].iter().map(|s| s.to_string()).collect();
        let opts = ClusterOptions {
            seed: 1,
            ..Default::default()
        };
        let reports = cluster(&p4, Some(&labels), &opts).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert!((r.conductance - 1.0 / 3.0).abs() < 1e-9, "{:?}", r.algorithm);
            assert_eq!(r.clustering_error, Some(0));
        }
    }

    #[test]
    fn cluster_with_sdp() {
        let tri = fixtures::triangle();
        let opts = ClusterOptions {
            with_sdp: true,
            sdp_restarts: 8,
            seed: 2,
            ..Default::default()
        };
        let reports = cluster(&tri, None, &opts).unwrap();
        assert_eq!(reports.len(), 3);
        let sdp = reports.iter().find(|r| r.algorithm == "sdp").unwrap();
        assert!((sdp.conductance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectrum_methods() {
        let p4 = fixtures::path(4);
        let opts = ClusterOptions {
            seed: 3,
            sdp_restarts: 8,
            ..Default::default()
        };
        let rep = spectrum(&p4, 1.0, "ipm", &opts).unwrap();
        assert!((rep.lambdas.last().unwrap() - 1.0 / 3.0).abs() < 1e-9);

        let rep = spectrum(&p4, 2.0, "dense", &opts).unwrap();
        assert_eq!(rep.lambdas.len(), 4);
        assert!(rep.certificate["accepted"].as_bool().unwrap());

        let rep = spectrum(&p4, 2.0, "sdp", &opts).unwrap();
        assert!(rep.lambdas[0] <= rep.lambdas[1] + 1e-4);

        assert!(spectrum(&p4, 2.0, "nope", &opts).is_err());
    }

    #[test]
    fn verify_suites_pass_smoke() {
        let reports = verify_suites("all", 1..6, 6).unwrap();
        assert_eq!(reports.len(), 6);
        for r in &reports {
            assert!(r.passed(), "suite {} failed: {:?}", r.name, r.failures);
        }
    }
}
