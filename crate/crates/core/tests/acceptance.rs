//! Acceptance checks, one test per criterion. Each test prints a PASS/FAIL
//! line with the numbers it judged before asserting.

mod common;

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;

use hybrid_reliability::bench::{
    case_by_key, case_cantilever_tube, case_crank_slider, case_linear, BenchmarkCase, CaseParams, CRANK_REFERENCE,
    CANTILEVER_REFERENCE, LINEAR_TABLE,
};
use hybrid_reliability::chance::{alpha_at_limit_state, alpha_sup_formula, chance_distribution, chance_reliability};
use hybrid_reliability::distributions::{standard_normal_cdf, UncertaintyDistribution};
use hybrid_reliability::integrator::{reliability_at_sigma, SigmaSchedule, DEFAULT_QUAD_NODES};
use hybrid_reliability::mcs::estimate_failure;
use hybrid_reliability::model::{standardize, HybridProblem, Lsf, RandomVariable, UncertainVariable};
use hybrid_reliability::pipeline::{analyze, Analysis, AnalysisSettings};
use hybrid_reliability::polar::polar_features;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} | {detail}", if ok { "PASS" } else { "FAIL" });
}

fn run(case: &BenchmarkCase) -> Analysis {
    analyze(&case.problem, &AnalysisSettings::default()).unwrap()
}

fn benchmark_cases() -> Vec<BenchmarkCase> {
    let mut cases: Vec<BenchmarkCase> = LINEAR_TABLE.iter().map(|&(m, n, ..)| case_linear(m, n).unwrap()).collect();
    for t in [0.0, 10.0, 20.0, 30.0, 40.0] {
        cases.push(case_crank_slider(t).unwrap());
    }
    cases.push(case_cantilever_tube().unwrap());
    cases
}

#[test]
fn criterion_01_degenerate_probabilistic() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [2usize, 5, 10] {
        // Non-standard means, spreads and weights so that standardisation matters.
        let means: Vec<f64> = (0..m).map(|i| 1.0 + 0.5 * i as f64).collect();
        let sds: Vec<f64> = (0..m).map(|i| 0.5 + 0.25 * i as f64).collect();
        let weights: Vec<f64> = (0..m).map(|i| 1.0 + (i % 3) as f64).collect();
        let spread = weights.iter().zip(&sds).map(|(w, s)| (w * s).powi(2)).sum::<f64>().sqrt();
        let centre: f64 = weights.iter().zip(&means).map(|(w, mu)| w * mu).sum();
        for beta in [1.0, 2.0, 3.0] {
            let c = centre + beta * spread;
            let w = weights.clone();
            let lsf: Lsf = Arc::new(move |x: &[f64], _: &[f64]| c - x.iter().zip(&w).map(|(x, w)| w * x).sum::<f64>());
            let randoms =
                (0..m).map(|i| RandomVariable::new(format!("x{i}"), means[i], sds[i])).collect();
            let p = HybridProblem::new("lin", randoms, vec![], lsf).unwrap();
            let a = analyze(&p, &AnalysisSettings::default()).unwrap();
            assert_eq!(a.interval.curve.len(), 1);
            let err = (a.interval.r_lo - standard_normal_cdf(beta)).abs();
            worst = worst.max(err);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-3 && elapsed < Duration::from_secs(5);
    verdict(1, ok, &format!("max |R_H - Phi(beta)| = {worst:.3e}, runtime {elapsed:?}"));
    assert!(ok);
}

#[test]
fn criterion_02_degenerate_uncertain() {
    let start = Instant::now();
    let cases: Vec<(&str, Lsf, Vec<(f64, f64)>)> = vec![
        ("0.3 - y", Arc::new(|_: &[f64], y: &[f64]| 0.3 - y[0]), vec![(0.0, 1.0)]),
        ("y^3 - 2", Arc::new(|_: &[f64], y: &[f64]| y[0].powi(3) - 2.0), vec![(1.0, 2.0)]),
        ("y1 + 2 y2 - 1", Arc::new(|_: &[f64], y: &[f64]| y[0] + 2.0 * y[1] - 1.0), vec![(-1.0, 1.0), (-1.0, 1.0)]),
        ("y1 y2 - 0.8", Arc::new(|_: &[f64], y: &[f64]| y[0] * y[1] - 0.8), vec![(0.5, 1.5), (0.2, 1.2)]),
        ("exp(y1) - 3 y2", Arc::new(|_: &[f64], y: &[f64]| y[0].exp() - 3.0 * y[1]), vec![(0.0, 1.0), (0.4, 1.0)]),
        ("2 - y1 - y2^2", Arc::new(|_: &[f64], y: &[f64]| 2.0 - y[0] - y[1] * y[1]), vec![(0.0, 2.0), (0.0, 1.5)]),
    ];
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for (name, lsf, bounds) in cases {
        let unc = bounds.iter().enumerate().map(|(i, &(a, b))| UncertainVariable::new(format!("y{i}"), a, b)).collect();
        let p = HybridProblem::new(name, vec![], unc, lsf).unwrap();
        let dists: Vec<UncertaintyDistribution> = p.unc_dists().unwrap();
        let profile = p.monotonicity(1e-6).unwrap();
        let f = &**p.lsf();
        let root = alpha_at_limit_state(f, &[], &dists, &profile, 1e-10).unwrap().alpha;
        let grid = if dists.len() == 1 { 10_001 } else { 1001 };
        let sup = alpha_sup_formula(f, &[], &dists, &profile, grid).unwrap();
        worst = worst.max((root - sup).abs());
        details.push(format!("{name}: {root:.6}/{sup:.6}"));
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-3 && elapsed < Duration::from_secs(5);
    verdict(2, ok, &format!("max |root - sup| = {worst:.3e}, runtime {elapsed:?}; {}", details.join("; ")));
    assert!(ok);
}

#[test]
fn criterion_03_duality() {
    let mut worst: f64 = 0.0;
    for case in benchmark_cases() {
        let a = run(&case);
        let iv = &a.interval;
        worst = worst.max((iv.f_lo + iv.r_hi - 1.0).abs()).max((iv.f_hi + iv.r_lo - 1.0).abs());
    }
    // Independent check: the distribution and reliability orientations of
    // the chance measure are computed by separate root problems.
    let lin = case_linear(2, 3).unwrap().problem;
    let (prob, unc) = (lin.prob_dists().unwrap(), lin.unc_dists().unwrap());
    let profile = lin.monotonicity(1e-6).unwrap();
    let f = &**lin.lsf();
    for x in [-0.5, 0.0, 0.4] {
        let fh = chance_distribution(f, &prob, &unc, &profile, x, 4).unwrap();
        let rh = chance_reliability(f, &prob, &unc, &profile, x, 4).unwrap();
        worst = worst.max((fh + rh - 1.0).abs());
    }
    let ok = worst < 2e-6;
    verdict(3, ok, &format!("max |F_H + R_H - 1| = {worst:.3e} over all benchmark runs and chance checks"));
    assert!(ok);
}

#[test]
fn criterion_04_density_suite() {
    let start = Instant::now();
    let mut worst_norm: f64 = 0.0;
    let mut worst_ks: f64 = 0.0;
    let mut details = Vec::new();
    for (i, case) in common::density_cases().iter().enumerate() {
        let total = common::simpson(&case.pdf, case.lower, case.upper, 1e-12);
        let ks = common::ks_against_pdf(&case.pdf, case.lower, common::draw(case, 1_000_000, 4000 + i as u64));
        worst_norm = worst_norm.max((total - 1.0).abs());
        worst_ks = worst_ks.max(ks);
        details.push(format!("{}: KS {ks:.2e}", case.label));
    }
    let elapsed = start.elapsed();
    let ok = worst_norm < 1e-8 && worst_ks < 0.01 && elapsed < Duration::from_secs(60);
    verdict(
        4,
        ok,
        &format!("max |mass - 1| = {worst_norm:.2e}, max KS = {worst_ks:.2e}, runtime {elapsed:?}; {}", details.join("; ")),
    );
    assert!(ok);
}

#[test]
fn criterion_05_polar_exactness() {
    let case = case_linear(5, 5).unwrap();
    let a = run(&case);
    let red = a.reduced.clone().unwrap();
    let std_problem = standardize(case.problem.clone());
    let mut rng = common::rng(55);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let mut omega: Vec<f64> = (0..5).map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal)).collect();
        omega.extend((0..5).map(|_| rng.random_range(-1.0..1.0)));
        let f = std_problem.evaluate_omega(&omega);
        let g = red.g_features(&polar_features(&omega, &red.alpha_dir, 5, 5).unwrap());
        if (f > 0.0) != (g > 0.0) {
            mismatches += 1;
        }
    }
    let d_err = (red.d - 10f64.sqrt()).abs();
    let ok = mismatches == 0 && d_err < 1e-9;
    verdict(5, ok, &format!("{mismatches} sign mismatches in 10^4 points, |d - sqrt(10)| = {d_err:.2e}"));
    assert!(ok);
}

#[test]
fn criterion_06_mcs_table() {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for &(m, n, _, (lo, hi)) in LINEAR_TABLE.iter().filter(|r| r.0 >= 5) {
        let case = case_linear(m, n).unwrap();
        let est = estimate_failure(&case.problem, 10_000_000, 0.95, 7).unwrap();
        let mid = 0.5 * (lo + hi);
        let dev = (est.p_hat - mid).abs() / est.half_width();
        ok &= dev <= 3.0;
        details.push(format!("({m},{n}) p={:.4e} mid={mid:.4e} dev={dev:.2} hw", est.p_hat));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    verdict(6, ok, &format!("{}; runtime {elapsed:?}", details.join("; ")));
    assert!(ok);
}

#[test]
fn criterion_07_linear_trend() {
    let mut rows = Vec::new();
    for &(m, n, published, _) in LINEAR_TABLE.iter() {
        let case = case_linear(m, n).unwrap();
        let a = run(&case);
        let est = estimate_failure(&case.problem, 4_000_000, 0.95, 7).unwrap();
        rows.push((m, n, a.interval.f_lo, a.interval.f_hi, est.p_hat, published));
    }
    let monotone = rows.windows(2).all(|w| w[1].2 > w[0].2 && w[1].3 > w[0].3);
    let conservative = rows.iter().all(|r| r.3 > r.4);
    let (_, _, lo, hi, _, (plo, phi)) = rows[4];
    let factor = (lo / plo).max(plo / lo).max(hi / phi).max(phi / hi);
    let ok = monotone && conservative && factor <= 5.0;
    let table: Vec<String> =
        rows.iter().map(|r| format!("({},{}) F=[{:.3e},{:.3e}] mcs={:.3e}", r.0, r.1, r.2, r.3, r.4)).collect();
    verdict(
        7,
        ok,
        &format!(
            "monotone={monotone} upper>mcs={conservative} (9,1) factor vs [{plo:.3e},{phi:.3e}] = {factor:.2}; {}",
            table.join("; ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_crank_slider_trend() {
    let mut rows = Vec::new();
    for t in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let a = run(&case_crank_slider(t).unwrap());
        rows.push((t, a.interval.f_lo, a.interval.f_hi));
    }
    let increasing = rows.windows(2).all(|w| w[1].1 > w[0].1 && w[1].2 > w[0].2);
    let (_, (plo, phi), _) = CRANK_REFERENCE[0];
    let (lo, hi) = (rows[0].1, rows[0].2);
    let overlaps = lo <= phi && hi >= plo;
    let adjacent = hi >= plo / 2.0 && lo <= 2.0 * phi;
    let ok = increasing && (overlaps || adjacent);
    let table: Vec<String> = rows.iter().map(|r| format!("t={} F=[{:.4e},{:.4e}]", r.0, r.1, r.2)).collect();
    verdict(
        8,
        ok,
        &format!("increasing={increasing} t=0 overlaps [{plo},{phi}]={overlaps} adjacent={adjacent}; {}", table.join("; ")),
    );
    assert!(ok);
}

#[test]
fn criterion_09_cantilever_tube() {
    let case = case_cantilever_tube().unwrap();
    let a = run(&case);
    let est = estimate_failure(&case.problem, 4_000_000, 0.95, 7).unwrap();
    let (lo, hi) = (a.interval.f_lo, a.interval.f_hi);
    let ((plo, phi), _) = CANTILEVER_REFERENCE;
    let within = |x: f64, r: f64| x >= r / 10.0 && x <= r * 10.0;
    let magnitude = within(lo, plo) && within(hi, phi);
    let conservative = hi >= est.ci_hi && hi - lo > est.ci_hi - est.ci_lo;
    let ok = magnitude && conservative;
    verdict(
        9,
        ok,
        &format!(
            "F=[{lo:.3e},{hi:.3e}] vs published [{plo:.3e},{phi:.3e}] within 10x={magnitude}; mcs={:.3e} CI=[{:.3e},{:.3e}] conservative={conservative}",
            est.p_hat, est.ci_lo, est.ci_hi
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_integrator_convergence() {
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for case in benchmark_cases() {
        let a = run(&case);
        let red = a.reduced.unwrap();
        let schedule = SigmaSchedule::uniform(case.problem.n(), 21).unwrap();
        for &s in &schedule.sigma_values {
            let r1 = reliability_at_sigma(&red, s, DEFAULT_QUAD_NODES).unwrap();
            let r2 = reliability_at_sigma(&red, s, 2 * DEFAULT_QUAD_NODES).unwrap();
            worst = worst.max((r1 - r2).abs());
        }
        let curve = &a.interval.curve;
        monotone &= curve.windows(2).all(|w| if red.d >= 0.0 { w[1].1 <= w[0].1 } else { w[1].1 >= w[0].1 });
    }
    let ok = worst < 1e-6 && monotone;
    verdict(10, ok, &format!("max doubling change {worst:.3e}, curves monotone={monotone}"));
    assert!(ok);
}

#[test]
fn criterion_11_determinism() {
    let mut identical = true;
    let mut checked = Vec::new();
    for key in ["linear", "crank_slider", "cantilever_tube"] {
        let args = ["run", "--case", key, "--mcs-samples", "200000", "--seed", "19", "--no-timing"];
        let a = Command::new(env!("CARGO_BIN_EXE_hra")).args(args).output().unwrap();
        let b = Command::new(env!("CARGO_BIN_EXE_hra")).args(args).output().unwrap();
        identical &= a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
        checked.push(key);
    }
    let case = case_by_key("crank_slider", &CaseParams { t: Some(30.0), ..Default::default() }).unwrap();
    let e1 = estimate_failure(&case.problem, 100_000, 0.95, 19).unwrap();
    let e2 = estimate_failure(&case.problem, 100_000, 0.95, 19).unwrap();
    identical &= e1.p_hat.to_bits() == e2.p_hat.to_bits() && e1.failures == e2.failures;
    verdict(11, identical, &format!("byte-identical CSV for {checked:?} and repeated MCS estimates"));
    assert!(identical);
}
