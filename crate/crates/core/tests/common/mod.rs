//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use hybrid_reliability::distributions::{chi_pdf, ProbabilityDistribution};

/// Adaptive Simpson quadrature with a Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // Pre-split so that narrow peaks cannot hide between the first nodes.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            step(f, x0, x1, f0, fm, f1, whole, tol / pieces as f64, 50)
        })
        .sum()
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and the CDF obtained by integrating `pdf` from `lower`.
///
/// The CDF is accumulated gap by gap between consecutive sorted samples with
/// 5-point Gauss–Legendre, so the density itself is what gets tested.
pub fn ks_against_pdf<F: Fn(f64) -> f64>(pdf: &F, lower: f64, mut samples: Vec<f64>) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut cdf = 0.0;
    let mut prev = lower;
    let mut ks: f64 = 0.0;
    for (i, &s) in samples.iter().enumerate() {
        if s > prev {
            let (c, h) = (0.5 * (prev + s), 0.5 * (s - prev));
            cdf += h * X.iter().zip(&W).map(|(x, w)| w * pdf(c + h * x)).sum::<f64>();
            prev = s;
        }
        ks = ks.max((cdf - i as f64 / n).abs()).max((cdf - (i + 1) as f64 / n).abs());
    }
    ks
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sum_of_squares<R: Rng>(rng: &mut R, k: u32) -> f64 {
    (0..k).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum()
}

/// First coordinate of a uniformly random unit vector in `dim` dimensions.
pub fn random_cosine<R: Rng>(rng: &mut R, dim: u32) -> f64 {
    let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    z[0] / z.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// One density family under test: its pdf, support used for normalisation
/// and KS accumulation, and an independent sampler.
pub struct DensityCase {
    pub label: String,
    pub pdf: Box<dyn Fn(f64) -> f64>,
    pub lower: f64,
    pub upper: f64,
    pub sampler: Box<dyn Fn(&mut ChaCha8Rng) -> f64>,
}

/// Chi, chi-square, shifted chi and cosine-angle densities at three
/// parameter settings each.
pub fn density_cases() -> Vec<DensityCase> {
    let mut cases = Vec::new();
    for dof in [1u32, 3, 6] {
        cases.push(DensityCase {
            label: format!("chi(dof={dof})"),
            pdf: Box::new(move |v| chi_pdf(v, dof).unwrap()),
            lower: 0.0,
            upper: 40.0,
            sampler: Box::new(move |r| sum_of_squares(r, dof).sqrt()),
        });
    }
    for dof in [2u32, 5, 10] {
        let d = ProbabilityDistribution::chi_square(dof).unwrap();
        cases.push(DensityCase {
            label: format!("chi_square(dof={dof})"),
            pdf: Box::new(move |x| d.pdf(x)),
            lower: 0.0,
            upper: 250.0,
            sampler: Box::new(move |r| sum_of_squares(r, dof)),
        });
    }
    for (dof, shift) in [(2u32, 0.5), (4, 2.0), (8, 5.0)] {
        let d = ProbabilityDistribution::shifted_chi(dof, shift).unwrap();
        cases.push(DensityCase {
            label: format!("shifted_chi(dof={dof}, shift={shift})"),
            pdf: Box::new(move |v| d.pdf(v)),
            lower: shift.sqrt(),
            upper: 40.0,
            sampler: Box::new(move |r| (sum_of_squares(r, dof) + shift).sqrt()),
        });
    }
    for dim in [3u32, 5, 10] {
        let d = ProbabilityDistribution::cosine_angle(dim).unwrap();
        cases.push(DensityCase {
            label: format!("cosine_angle(N={dim})"),
            pdf: Box::new(move |v| d.pdf(v)),
            lower: -1.0,
            upper: 1.0,
            sampler: Box::new(move |r| random_cosine(r, dim)),
        });
    }
    cases
}

pub fn draw(case: &DensityCase, count: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..count).map(|_| (case.sampler)(&mut r)).collect()
}
