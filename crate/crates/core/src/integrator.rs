//! Reliability interval from the reduced limit state.
//!
//! For an error term `σ` the radius is `v1 = √(ξ1 + σ)` with `ξ1 ~ χ²(m)`,
//! and `ξ3` follows the cosine-angle law in `m + n` dimensions. The safe
//! domain is `d + v1·ξ3 > 0`. The failure side is a tail event, computed
//! directly as
//!
//! ```text
//! T(a) = P{v1·ξ3 <= -a},  a = |d|
//!      = ∫ c·sin^{N-2}θ ∫ χ_m(s) ds dθ,   θ ∈ [θ_cut, π],
//!        s ∈ [√max(a²/cos²θ − σ, 0), s_max]
//! ```
//!
//! using `ξ3 = cos θ` and `v1 = √(s² + σ)`. Then `R = 1 − T(d)` for `d >= 0`
//! and `R = T(|d|)` for `d < 0`. Both directions are tensor Gauss–Legendre
//! rules; the outer range is split where the inner lower limit reaches zero.

use rayon::prelude::*;

use crate::distributions::{chi_pdf, cos_angle_norm, standard_normal_cdf, ProbabilityDistribution, UncertaintyDistribution};
use crate::error::{HraError, Result};
use crate::polar::ReducedLsf;
use crate::quadrature::GaussLegendre;

/// Upper-tail mass dropped when truncating the radius.
const RADIUS_TAIL: f64 = 1e-10;
/// Maximum relative change in `R` tolerated on node doubling.
const DOUBLING_TOL: f64 = 1e-6;
pub const MIN_QUAD_NODES: usize = 32;
pub const DEFAULT_QUAD_NODES: usize = 64;
pub const DEFAULT_LEVELS: usize = 21;

/// Sequence of `σ` values swept to form the interval.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SigmaSchedule {
    pub levels: Vec<f64>,
    pub sigma_values: Vec<f64>,
}

impl SigmaSchedule {
    /// `k` uniform levels of `Linear(0, n)`. With `n = 0` the schedule is the
    /// single value `σ = 0`.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Ok(Self { levels: vec![0.0], sigma_values: vec![0.0] });
        }
        Self::with_distribution(&UncertaintyDistribution::linear(0.0, n as f64)?, k)
    }

    /// `k` uniform levels of an arbitrary uncertainty distribution for `ξ2`.
    pub fn with_distribution(dist: &UncertaintyDistribution, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(HraError::InvalidParameter(format!("need at least 2 alpha levels, got {k}")));
        }
        let (lo, _) = dist.bounds();
        if lo < 0.0 {
            return Err(HraError::InvalidParameter("the error term is a sum of squares; support must be >= 0".into()));
        }
        let levels: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
        let sigma_values = levels.iter().map(|a| dist.inverse(*a)).collect();
        Ok(Self { levels, sigma_values })
    }

    /// Explicit `σ` values; they must be non-negative and non-decreasing.
    pub fn from_sigmas(sigma_values: Vec<f64>) -> Result<Self> {
        if sigma_values.is_empty() {
            return Err(HraError::InvalidParameter("empty sigma schedule".into()));
        }
        if sigma_values.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || sigma_values.windows(2).any(|w| w[1] < w[0]) {
            return Err(HraError::InvalidParameter("sigma values must be finite, >= 0 and non-decreasing".into()));
        }
        let k = sigma_values.len();
        let levels = (0..k).map(|i| if k == 1 { 0.0 } else { i as f64 / (k - 1) as f64 }).collect();
        Ok(Self { levels, sigma_values })
    }

    pub fn len(&self) -> usize {
        self.sigma_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReliabilityInterval {
    pub r_lo: f64,
    pub r_hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    /// `(σ_k, R_H(σ_k))` in schedule order.
    pub curve: Vec<(f64, f64)>,
}

fn tail_probability(a: f64, m: usize, total_dim: usize, sigma: f64, nodes: usize) -> Result<f64> {
    let chi2 = ProbabilityDistribution::chi_square(m as u32)?;
    let s_max = chi2.inverse_cdf(1.0 - RADIUS_TAIL)?.sqrt();
    let v1_max = (s_max * s_max + sigma).sqrt();
    if a >= v1_max {
        return Ok(0.0);
    }
    let theta_cut = (-a / v1_max).acos();
    let mut breaks = vec![theta_cut];
    if sigma > 0.0 && a < sigma.sqrt() {
        let theta_k = (-a / sigma.sqrt()).acos();
        if theta_k > theta_cut && theta_k < std::f64::consts::PI {
            breaks.push(theta_k);
        }
    }
    breaks.push(std::f64::consts::PI);

    let rule = GaussLegendre::new(nodes);
    let c = cos_angle_norm(total_dim as u32);
    let power = total_dim as i32 - 2;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        for (theta, wt) in rule.mapped(w[0], w[1]) {
            let cos = theta.cos();
            let s_lo = if cos == 0.0 {
                f64::INFINITY
            } else {
                (a * a / (cos * cos) - sigma).max(0.0).sqrt()
            };
            if s_lo >= s_max {
                continue;
            }
            let mut inner = 0.0;
            for (s, ws) in rule.mapped(s_lo, s_max) {
                inner += ws * chi_pdf(s, m as u32)?;
            }
            total += wt * c * theta.sin().powi(power) * inner;
        }
    }
    Ok(total.clamp(0.0, 1.0))
}

fn reliability_with_nodes(reduced: &ReducedLsf, sigma: f64, nodes: usize) -> Result<f64> {
    let (m, n) = (reduced.m, reduced.n);
    if m + n == 1 {
        // one standard normal variable: the polar angle law is undefined
        return Ok(standard_normal_cdf(reduced.d));
    }
    let tail = tail_probability(reduced.d.abs(), m, m + n, sigma, nodes)?;
    Ok(if reduced.d >= 0.0 { 1.0 - tail } else { tail })
}

/// `R_H(σ) = P{d + v1·ξ3 > 0}`; rejected when doubling the node count moves
/// the result by more than `1e-6` relative.
pub fn reliability_at_sigma(reduced: &ReducedLsf, sigma: f64, quad_nodes: usize) -> Result<f64> {
    if reduced.m == 0 {
        return Err(HraError::InvalidParameter(
            "the polar integrator needs at least one random variable".into(),
        ));
    }
    if quad_nodes < MIN_QUAD_NODES {
        return Err(HraError::InvalidParameter(format!(
            "quad_nodes must be at least {MIN_QUAD_NODES}, got {quad_nodes}"
        )));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(HraError::InvalidParameter(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    let coarse = reliability_with_nodes(reduced, sigma, quad_nodes)?;
    let fine = reliability_with_nodes(reduced, sigma, 2 * quad_nodes)?;
    let change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if change > DOUBLING_TOL {
        return Err(HraError::Accuracy(format!(
            "reliability at sigma={sigma} changed by {change:e} on node doubling ({coarse} -> {fine})"
        )));
    }
    Ok(fine)
}

/// Evaluates every schedule level (concurrently) and returns the envelope.
pub fn reliability_interval(
    reduced: &ReducedLsf,
    schedule: &SigmaSchedule,
    quad_nodes: usize,
) -> Result<ReliabilityInterval> {
    if schedule.is_empty() {
        return Err(HraError::InvalidParameter("empty sigma schedule".into()));
    }
    let values: Vec<f64> = schedule
        .sigma_values
        .par_iter()
        .map(|s| reliability_at_sigma(reduced, *s, quad_nodes))
        .collect::<Result<_>>()?;
    let curve: Vec<(f64, f64)> = schedule.sigma_values.iter().copied().zip(values).collect();
    let r_lo = curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let r_hi = curve.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(ReliabilityInterval { r_lo, r_hi, f_lo: 1.0 - r_hi, f_hi: 1.0 - r_lo, curve })
}
