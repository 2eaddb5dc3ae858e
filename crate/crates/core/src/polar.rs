//! Polar-coordinate features and the first-order reduction of the
//! standardized limit state to `g(ξ1, ξ2, ξ3) = dD + D√(ξ1 + ξ2)·ξ3`.

use crate::error::{HraError, Result};
use crate::model::StandardizedProblem;
use crate::uhlrf::DesignPoint;

/// Angle (radians) above which the design point and the gradient direction
/// are reported as not collinear.
pub const COLLINEARITY_WARN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarFeatures {
    pub v1: f64,
    pub v2: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
}

/// Radius of `ω`, cosine of its angle to `alpha_dir`, and the split of the
/// squared radius into random (`ξ1`) and uncertain (`ξ2`) parts.
pub fn polar_features(omega: &[f64], alpha_dir: &[f64], m: usize, n: usize) -> Result<PolarFeatures> {
    if omega.len() != m + n || alpha_dir.len() != m + n {
        return Err(HraError::InvalidParameter(format!(
            "expected vectors of length {}, got {} and {}",
            m + n,
            omega.len(),
            alpha_dir.len()
        )));
    }
    let xi1: f64 = omega[..m].iter().map(|v| v * v).sum();
    let xi2: f64 = omega[m..].iter().map(|v| v * v).sum();
    let v1 = (xi1 + xi2).sqrt();
    if v1 == 0.0 {
        return Err(HraError::UndefinedAngle);
    }
    let dot: f64 = omega.iter().zip(alpha_dir).map(|(a, b)| a * b).sum();
    let v2 = (dot / v1).clamp(-1.0, 1.0);
    Ok(PolarFeatures { v1, v2, xi1, xi2, xi3: v2 })
}

/// First-order reduced limit state.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReducedLsf {
    /// Signed distance from the origin to the tangent plane.
    pub d: f64,
    /// Gradient norm at the expansion point.
    #[serde(rename = "D")]
    pub big_d: f64,
    pub m: usize,
    pub n: usize,
    /// Unit gradient at the expansion point.
    pub alpha_dir: Vec<f64>,
    /// Angle between `alpha_dir` and the line through the expansion point;
    /// `None` when the expansion point is the origin.
    pub collinearity_angle: Option<f64>,
}

impl ReducedLsf {
    /// Builds a reduced LSF directly from `(d, D)`; the direction is taken as
    /// the first axis.
    pub fn from_parts(d: f64, big_d: f64, m: usize, n: usize) -> Result<Self> {
        if !(big_d > 0.0 && big_d.is_finite()) || !d.is_finite() {
            return Err(HraError::InvalidParameter(format!("need finite d and D > 0, got d={d}, D={big_d}")));
        }
        if m + n == 0 {
            return Err(HraError::InvalidParameter("m + n must be positive".into()));
        }
        let mut alpha_dir = vec![0.0; m + n];
        alpha_dir[0] = 1.0;
        Ok(Self { d, big_d, m, n, alpha_dir, collinearity_angle: None })
    }

    pub fn total_dim(&self) -> usize {
        self.m + self.n
    }

    pub fn g(&self, xi1: f64, xi2: f64, xi3: f64) -> f64 {
        self.d * self.big_d + self.big_d * (xi1 + xi2).sqrt() * xi3
    }

    pub fn g_features(&self, p: &PolarFeatures) -> f64 {
        self.g(p.xi1, p.xi2, p.xi3)
    }

    /// Safe-domain test in the normalized form `d + √(ξ1 + ξ2)·ξ3 > 0`,
    /// which has the sign of `g` because `D > 0`.
    pub fn is_safe(&self, xi1: f64, xi2: f64, xi3: f64) -> bool {
        self.d + (xi1 + xi2).sqrt() * xi3 > 0.0
    }
}

/// Linearizes the standardized problem at the design point.
pub fn reduce(std_problem: &StandardizedProblem, design_point: &DesignPoint) -> Result<ReducedLsf> {
    reduce_at(std_problem, &design_point.omega())
}

/// Linearizes the standardized problem at an arbitrary point `ω`.
pub fn reduce_at(std_problem: &StandardizedProblem, omega: &[f64]) -> Result<ReducedLsf> {
    let (m, n) = (std_problem.m(), std_problem.n());
    if omega.len() != m + n {
        return Err(HraError::InvalidParameter(format!(
            "expansion point has length {}, expected {}",
            omega.len(),
            m + n
        )));
    }
    let grad = std_problem.gradient_omega(omega);
    let big_d = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if !(big_d >= 1e-12) {
        return Err(HraError::DegenerateGradient { norm: big_d });
    }
    let f0 = std_problem.evaluate_omega(omega);
    let g_dot_w: f64 = grad.iter().zip(omega).map(|(g, w)| g * w).sum();
    let d = (f0 - g_dot_w) / big_d;
    let alpha_dir: Vec<f64> = grad.iter().map(|g| g / big_d).collect();

    let norm = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    let collinearity_angle = (norm > 0.0).then(|| {
        let cos = alpha_dir.iter().zip(omega).map(|(a, w)| a * w).sum::<f64>() / norm;
        cos.abs().clamp(0.0, 1.0).acos()
    });
    if let Some(angle) = collinearity_angle {
        if angle > COLLINEARITY_WARN {
            log::warn!(
                "design point is {angle:.3e} rad off the gradient direction; the tangent plane is used as computed"
            );
        }
    }
    Ok(ReducedLsf { d, big_d, m, n, alpha_dir, collinearity_angle })
}
