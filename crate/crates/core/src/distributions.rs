//! Probability and uncertainty distribution families.
//!
//! Probability side: the Gaussian inputs, the chi-square law of the squared
//! random radius, the chi law of the radius shifted by the uncertain error
//! term `σ`, and the law of the cosine between a uniformly random direction
//! and a fixed unit vector. Uncertainty side: the linear uncertainty
//! distribution, the only family needed when just interval bounds are known.
//!
//! Gamma, incomplete gamma and incomplete beta come from `statrs`
//! (Lanczos-based `ln_gamma`).

use rand::Rng;
use rand_distr::{Beta, ChiSquared, Distribution, Normal, StandardNormal};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use std::f64::consts::{LN_2, SQRT_2};

use crate::error::{HraError, Result};

fn invalid(msg: impl Into<String>) -> HraError {
    HraError::InvalidParameter(msg.into())
}

/// `Pr{Z <= z}` for a standard normal `Z`.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Inverse of [`standard_normal_cdf`] on `(0, 1)`.
pub fn standard_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * erfc_inv(2.0 * p)
}

pub fn normal_cdf(x: f64, mean: f64, stddev: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("normal_cdf: x must be finite, got {x}")));
    }
    if !mean.is_finite() || !stddev.is_finite() || stddev <= 0.0 {
        return Err(invalid(format!(
            "normal_cdf: need finite mean and stddev > 0, got mean={mean}, stddev={stddev}"
        )));
    }
    Ok(standard_normal_cdf((x - mean) / stddev))
}

/// Density of `χ²(dof)`.
pub fn chi_square_pdf(x: f64, dof: u32) -> Result<f64> {
    if dof < 1 {
        return Err(invalid("chi_square_pdf: dof must be >= 1"));
    }
    if x <= 0.0 || !x.is_finite() {
        return Ok(0.0);
    }
    let half = 0.5 * dof as f64;
    Ok(((half - 1.0) * x.ln() - 0.5 * x - half * LN_2 - ln_gamma(half)).exp())
}

/// Density of the chi law with `dof` degrees of freedom (norm of a standard
/// Gaussian vector in `dof` dimensions).
pub fn chi_pdf(v: f64, dof: u32) -> Result<f64> {
    if dof < 1 {
        return Err(invalid("chi_pdf: dof must be >= 1"));
    }
    if v <= 0.0 || !v.is_finite() {
        return Ok(0.0);
    }
    let half = 0.5 * dof as f64;
    Ok(((1.0 - half) * LN_2 + (dof as f64 - 1.0) * v.ln() - 0.5 * v * v - ln_gamma(half)).exp())
}

/// Which printed form of the shifted chi density to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftedChiForm {
    /// Density of `sqrt(Q + σ)`, `Q ~ χ²(dof)`, by change of variables.
    #[default]
    ChangeOfVariables,
    /// `2^{1-m/2} (v²-σ)^{(m-1)/2} exp(-(v²-σ)/2) / Γ(m/2)`: the chi density
    /// evaluated at `sqrt(v²-σ)` without the Jacobian `v / sqrt(v²-σ)`. It is
    /// not normalised for `σ > 0`; kept for comparison only.
    Literal,
}

/// Density of `v1 = sqrt(Q + shift)` with `Q ~ χ²(dof)`.
pub fn shifted_chi_pdf(v1: f64, dof: u32, shift: f64) -> Result<f64> {
    shifted_chi_pdf_with(v1, dof, shift, ShiftedChiForm::ChangeOfVariables)
}

pub fn shifted_chi_pdf_with(v1: f64, dof: u32, shift: f64, form: ShiftedChiForm) -> Result<f64> {
    if dof < 1 {
        return Err(invalid("shifted_chi_pdf: dof must be >= 1"));
    }
    if !(shift >= 0.0) || !shift.is_finite() {
        return Err(invalid(format!("shifted_chi_pdf: shift must be >= 0, got {shift}")));
    }
    let q = v1 * v1 - shift;
    if v1 <= 0.0 || q <= 0.0 || !v1.is_finite() {
        return Ok(0.0);
    }
    let half = 0.5 * dof as f64;
    let log_pdf = match form {
        // 2 v · χ²pdf(v² − σ)
        ShiftedChiForm::ChangeOfVariables => {
            (1.0 - half) * LN_2 + v1.ln() + (half - 1.0) * q.ln() - 0.5 * q - ln_gamma(half)
        }
        ShiftedChiForm::Literal => {
            (1.0 - half) * LN_2 + 0.5 * (dof as f64 - 1.0) * q.ln() - 0.5 * q - ln_gamma(half)
        }
    };
    Ok(log_pdf.exp())
}

/// `1 / ∫_0^π sin^{N-2}(a) da`, the normalising constant of the cosine-angle
/// density in `total_dim = N` dimensions.
pub fn cos_angle_norm(total_dim: u32) -> f64 {
    let k = total_dim as f64 - 2.0;
    // ∫_0^π sin^k = B(1/2, (k+1)/2)
    (-ln_beta(0.5, 0.5 * (k + 1.0))).exp()
}

/// Density of the cosine of the angle between a uniformly random direction
/// in `total_dim` dimensions and a fixed unit vector.
///
/// Only one `sin^{N-2}` term is kept in the numerator so that the density
/// integrates to one on `(-1, 1)`.
pub fn cos_angle_pdf(v: f64, total_dim: u32) -> Result<f64> {
    if total_dim < 2 {
        return Err(invalid("cos_angle_pdf: total_dim must be >= 2"));
    }
    if !(v.abs() < 1.0) {
        return Ok(0.0);
    }
    let s2 = 1.0 - v * v;
    // sin^{N-2}(arccos v) / sqrt(1 - v²) = (1 - v²)^{(N-3)/2}
    Ok(cos_angle_norm(total_dim) * s2.powf(0.5 * (total_dim as f64 - 3.0)))
}

fn check_linear_bounds(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() || b <= a {
        return Err(invalid(format!("linear uncertainty distribution needs finite a < b, got [{a}, {b}]")));
    }
    Ok(())
}

pub fn linear_unc_cdf(x: f64, a: f64, b: f64) -> Result<f64> {
    check_linear_bounds(a, b)?;
    Ok(((x - a) / (b - a)).clamp(0.0, 1.0))
}

pub fn linear_unc_inv(alpha: f64, a: f64, b: f64) -> Result<f64> {
    check_linear_bounds(a, b)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(format!("linear_unc_inv: alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(a + alpha * (b - a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbabilityDistribution {
    Normal { mean: f64, stddev: f64 },
    ChiSquare { dof: u32 },
    ShiftedChi { dof: u32, shift: f64 },
    CosineAngle { total_dim: u32 },
}

impl ProbabilityDistribution {
    pub fn normal(mean: f64, stddev: f64) -> Result<Self> {
        if !mean.is_finite() || !stddev.is_finite() || stddev <= 0.0 {
            return Err(invalid(format!("normal needs finite mean and stddev > 0, got ({mean}, {stddev})")));
        }
        Ok(Self::Normal { mean, stddev })
    }

    pub fn chi_square(dof: u32) -> Result<Self> {
        if dof < 1 {
            return Err(invalid("chi-square needs dof >= 1"));
        }
        Ok(Self::ChiSquare { dof })
    }

    pub fn shifted_chi(dof: u32, shift: f64) -> Result<Self> {
        if dof < 1 || !(shift >= 0.0) || !shift.is_finite() {
            return Err(invalid(format!("shifted chi needs dof >= 1 and shift >= 0, got ({dof}, {shift})")));
        }
        Ok(Self::ShiftedChi { dof, shift })
    }

    pub fn cosine_angle(total_dim: u32) -> Result<Self> {
        if total_dim < 2 {
            return Err(invalid("cosine-angle needs total_dim >= 2"));
        }
        Ok(Self::CosineAngle { total_dim })
    }

    /// Closure of the support as `(lower, upper)`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::ChiSquare { .. } => (0.0, f64::INFINITY),
            Self::ShiftedChi { shift, .. } => (shift.sqrt(), f64::INFINITY),
            Self::CosineAngle { .. } => (-1.0, 1.0),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        // Parameters were validated at construction.
        match *self {
            Self::Normal { mean, stddev } => {
                let z = (x - mean) / stddev;
                (-0.5 * z * z).exp() / (stddev * (2.0 * std::f64::consts::PI).sqrt())
            }
            Self::ChiSquare { dof } => chi_square_pdf(x, dof).unwrap_or(0.0),
            Self::ShiftedChi { dof, shift } => shifted_chi_pdf(x, dof, shift).unwrap_or(0.0),
            Self::CosineAngle { total_dim } => cos_angle_pdf(x, total_dim).unwrap_or(0.0),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, stddev } => standard_normal_cdf((x - mean) / stddev),
            Self::ChiSquare { dof } => {
                if x <= 0.0 {
                    0.0
                } else if x == f64::INFINITY {
                    1.0
                } else {
                    gamma_lr(0.5 * dof as f64, 0.5 * x)
                }
            }
            Self::ShiftedChi { dof, shift } => {
                let q = x * x - shift;
                if x <= 0.0 || q <= 0.0 {
                    0.0
                } else if x == f64::INFINITY {
                    1.0
                } else {
                    gamma_lr(0.5 * dof as f64, 0.5 * q)
                }
            }
            Self::CosineAngle { total_dim } => {
                if x <= -1.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    let a = 0.5 * (total_dim as f64 - 1.0);
                    beta_reg(a, a, 0.5 * (1.0 + x))
                }
            }
        }
    }

    /// Upper tail `1 - cdf(x)`, computed without cancellation where possible.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, stddev } => standard_normal_cdf(-(x - mean) / stddev),
            Self::ChiSquare { dof } if x > 0.0 && x.is_finite() => gamma_ur(0.5 * dof as f64, 0.5 * x),
            Self::ShiftedChi { dof, shift } if x > 0.0 && x * x > shift && x.is_finite() => {
                gamma_ur(0.5 * dof as f64, 0.5 * (x * x - shift))
            }
            Self::CosineAngle { total_dim } if x.abs() < 1.0 => {
                let a = 0.5 * (total_dim as f64 - 1.0);
                beta_reg(a, a, 0.5 * (1.0 - x))
            }
            _ => 1.0 - self.cdf(x),
        }
    }

    /// Quantile function on `[0, 1]`.
    pub fn inverse_cdf(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("inverse_cdf: p must lie in [0, 1], got {p}")));
        }
        let (lo, hi) = self.support();
        if p == 0.0 {
            return Ok(lo);
        }
        if p == 1.0 {
            return Ok(hi);
        }
        if let Self::Normal { mean, stddev } = *self {
            return Ok(mean + stddev * standard_normal_quantile(p));
        }
        let mut a = lo;
        let mut b = if hi.is_finite() { hi } else { (lo.max(0.0) + 1.0) * 2.0 };
        // Bracket on the upper tail for unbounded supports.
        if !hi.is_finite() {
            while self.cdf(b) < p {
                a = b;
                b *= 2.0;
            }
        }
        // Bisection on the tail that is better conditioned.
        let upper_tail = p > 0.5;
        let target = if upper_tail { 1.0 - p } else { p };
        for _ in 0..400 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let below = if upper_tail { self.sf(mid) > target } else { self.cdf(mid) < target };
            if below {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Normal { mean, stddev } => {
                Normal::new(mean, stddev).expect("validated normal").sample(rng)
            }
            Self::ChiSquare { dof } => ChiSquared::new(dof as f64).expect("validated dof").sample(rng),
            Self::ShiftedChi { dof, shift } => {
                let q: f64 = ChiSquared::new(dof as f64).expect("validated dof").sample(rng);
                (q + shift).sqrt()
            }
            Self::CosineAngle { total_dim } => {
                if total_dim == 2 {
                    // Beta(1/2, 1/2) sampling is fragile; use the angle directly.
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    return z1 / z1.hypot(z2);
                }
                let a = 0.5 * (total_dim as f64 - 1.0);
                let b: f64 = Beta::new(a, a).expect("validated dim").sample(rng);
                2.0 * b - 1.0
            }
        }
    }
}

/// Uncertainty distributions `Υ(x) = M{τ <= x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UncertaintyDistribution {
    Linear { lower: f64, upper: f64 },
}

impl UncertaintyDistribution {
    pub fn linear(lower: f64, upper: f64) -> Result<Self> {
        check_linear_bounds(lower, upper)?;
        Ok(Self::Linear { lower, upper })
    }

    /// Regular distributions have a continuous, strictly increasing `Υ` on
    /// the support, so `Υ⁻¹` exists on `(0, 1)`.
    pub fn is_regular(&self) -> bool {
        match self {
            Self::Linear { .. } => true,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::Linear { lower, upper } => (lower, upper),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Linear { lower, upper } => ((x - lower) / (upper - lower)).clamp(0.0, 1.0),
        }
    }

    /// `Υ⁻¹(alpha)`, with `alpha` clamped to `[0, 1]`; the endpoints map to the
    /// support bounds.
    pub fn inverse(&self, alpha: f64) -> f64 {
        match *self {
            Self::Linear { lower, upper } => lower + alpha.clamp(0.0, 1.0) * (upper - lower),
        }
    }
}
