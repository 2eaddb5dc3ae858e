//! Monte Carlo baseline. Random variables are drawn from their normals and
//! uncertain variables uniformly over their intervals, jointly per
//! realization.
//!
//! Generator: ChaCha8 (`rand_chacha`). Samples are split into blocks of
//! 65 536; block `b` uses the seed with stream number `b`, so the estimate
//! does not depend on how blocks are assigned to threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::distributions::standard_normal_quantile;
use crate::error::{HraError, Result};
use crate::model::HybridProblem;

pub const GENERATOR: &str = "ChaCha8";
pub const MIN_SAMPLES: u64 = 10_000;
const BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MCSEstimate {
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub failures: u64,
    pub samples: u64,
    pub confidence: f64,
    pub seed: u64,
    /// Set when no failure (or no survivor) was observed and the bound on
    /// the empty side comes from the one-sided zero-count rule.
    pub zero_count_bound: bool,
    pub generator: &'static str,
}

impl MCSEstimate {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }
}

fn count_block(problem: &HybridProblem, seed: u64, block: u64, len: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut x = vec![0.0; problem.m()];
    let mut y = vec![0.0; problem.n()];
    let mut failures = 0;
    for _ in 0..len {
        for (xi, r) in x.iter_mut().zip(problem.randoms()) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *xi = r.mean + r.stddev * z;
        }
        for (yi, u) in y.iter_mut().zip(problem.uncertains()) {
            *yi = u.lower + (u.upper - u.lower) * rng.random::<f64>();
        }
        if problem.evaluate(&x, &y) <= 0.0 {
            failures += 1;
        }
    }
    failures
}

/// Failure fraction `P{g <= 0}` with a normal-approximation confidence
/// interval clamped to `[0, 1]`. With zero failures the upper bound is
/// `-ln(1 - confidence)/N` (about `3/N` at 95%).
pub fn estimate_failure(problem: &HybridProblem, samples: u64, confidence: f64, seed: u64) -> Result<MCSEstimate> {
    if samples < MIN_SAMPLES {
        return Err(HraError::InvalidParameter(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(HraError::InvalidParameter(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let blocks = samples.div_ceil(BLOCK);
    let failures: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| count_block(problem, seed, b, BLOCK.min(samples - b * BLOCK)))
        .sum();
    let n = samples as f64;
    let p_hat = failures as f64 / n;
    let rule_bound = -(1.0 - confidence).ln() / n;
    let (ci_lo, ci_hi, zero_count_bound) = if failures == 0 {
        (0.0, rule_bound.min(1.0), true)
    } else if failures == samples {
        ((1.0 - rule_bound).max(0.0), 1.0, true)
    } else {
        let z = standard_normal_quantile(0.5 * (1.0 + confidence));
        let half = z * (p_hat * (1.0 - p_hat) / n).sqrt();
        ((p_hat - half).max(0.0), (p_hat + half).min(1.0), false)
    };
    Ok(MCSEstimate {
        p_hat,
        ci_lo,
        ci_hi,
        failures,
        samples,
        confidence,
        seed,
        zero_count_bound,
        generator: GENERATOR,
    })
}
