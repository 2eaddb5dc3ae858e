//! Hybrid problem definition, standard transforms and the reference
//! evaluators of the reliability metric.

use std::fmt;
use std::sync::Arc;

use crate::chance::{self, MonotonicityProfile};
use crate::distributions::{ProbabilityDistribution, UncertaintyDistribution};
use crate::error::{HraError, Result};

/// Limit-state function `G = f(x, y)`; `G > 0` is safe. Must tolerate
/// concurrent calls.
pub type Lsf = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Analytic gradient `(∂f/∂x, ∂f/∂y)` in physical coordinates.
pub type Gradient = Arc<dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Default relative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RandomVariable {
    pub name: String,
    pub mean: f64,
    pub stddev: f64,
}

impl RandomVariable {
    pub fn new(name: impl Into<String>, mean: f64, stddev: f64) -> Self {
        Self { name: name.into(), mean, stddev }
    }

    pub fn distribution(&self) -> Result<ProbabilityDistribution> {
        ProbabilityDistribution::normal(self.mean, self.stddev)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UncertainVariable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl UncertainVariable {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self { name: name.into(), lower, upper }
    }

    pub fn distribution(&self) -> Result<UncertaintyDistribution> {
        UncertaintyDistribution::linear(self.lower, self.upper)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// A limit-state function over `m` normal random variables and `n` uncertain
/// variables with Linear uncertainty distributions on `[lower, upper]`.
#[derive(Clone)]
pub struct HybridProblem {
    name: String,
    lsf: Lsf,
    gradient: Option<Gradient>,
    randoms: Vec<RandomVariable>,
    uncertains: Vec<UncertainVariable>,
}

impl fmt::Debug for HybridProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HybridProblem")
            .field("name", &self.name)
            .field("randoms", &self.randoms)
            .field("uncertains", &self.uncertains)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl HybridProblem {
    pub fn new(
        name: impl Into<String>,
        randoms: Vec<RandomVariable>,
        uncertains: Vec<UncertainVariable>,
        lsf: Lsf,
    ) -> Result<Self> {
        if randoms.len() + uncertains.len() == 0 {
            return Err(HraError::InvalidParameter("problem needs at least one variable".into()));
        }
        for r in &randoms {
            if !(r.mean.is_finite() && r.stddev.is_finite() && r.stddev > 0.0) {
                return Err(HraError::InvalidParameter(format!(
                    "random variable {} needs finite mean and stddev > 0",
                    r.name
                )));
            }
        }
        for u in &uncertains {
            if !(u.lower.is_finite() && u.upper.is_finite() && u.lower < u.upper) {
                return Err(HraError::InvalidParameter(format!(
                    "uncertain variable {} needs finite bounds with lower < upper",
                    u.name
                )));
            }
        }
        Ok(Self { name: name.into(), lsf, gradient: None, randoms, uncertains })
    }

    pub fn with_gradient(mut self, gradient: Gradient) -> Self {
        self.gradient = Some(gradient);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m(&self) -> usize {
        self.randoms.len()
    }

    pub fn n(&self) -> usize {
        self.uncertains.len()
    }

    pub fn randoms(&self) -> &[RandomVariable] {
        &self.randoms
    }

    pub fn uncertains(&self) -> &[UncertainVariable] {
        &self.uncertains
    }

    pub fn lsf(&self) -> &Lsf {
        &self.lsf
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.lsf)(x, y)
    }

    pub fn prob_dists(&self) -> Result<Vec<ProbabilityDistribution>> {
        self.randoms.iter().map(RandomVariable::distribution).collect()
    }

    pub fn unc_dists(&self) -> Result<Vec<UncertaintyDistribution>> {
        self.uncertains.iter().map(UncertainVariable::distribution).collect()
    }

    /// Monotonicity of `f` in each uncertain variable, detected with the
    /// random inputs at their means and the uncertain inputs at midpoints.
    pub fn monotonicity(&self, fd_step: f64) -> Result<MonotonicityProfile> {
        let means: Vec<f64> = self.randoms.iter().map(|r| r.mean).collect();
        let mids: Vec<f64> = self.uncertains.iter().map(UncertainVariable::midpoint).collect();
        let dists = self.unc_dists()?;
        let f = |x: &[f64], y: &[f64]| (self.lsf)(x, y);
        Ok(MonotonicityProfile::detect(&f, &means, &dists, &mids, fd_step, 0x5eed))
    }
}

/// The problem in standard coordinates `u = (x - μ)/σ`,
/// `δ = (2y - (a + b))/(b - a)`.
#[derive(Clone, Debug)]
pub struct StandardizedProblem {
    problem: HybridProblem,
    fd_step: f64,
}

pub fn standardize(problem: HybridProblem) -> StandardizedProblem {
    StandardizedProblem { problem, fd_step: DEFAULT_FD_STEP }
}

impl StandardizedProblem {
    pub fn with_fd_step(mut self, fd_step: f64) -> Result<Self> {
        if !(fd_step.is_finite() && fd_step > 0.0) {
            return Err(HraError::InvalidParameter(format!("fd_step must be > 0, got {fd_step}")));
        }
        self.fd_step = fd_step;
        Ok(self)
    }

    pub fn problem(&self) -> &HybridProblem {
        &self.problem
    }

    pub fn m(&self) -> usize {
        self.problem.m()
    }

    pub fn n(&self) -> usize {
        self.problem.n()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn to_u(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.problem.randoms).map(|(x, r)| (x - r.mean) / r.stddev).collect()
    }

    pub fn from_u(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.problem.randoms).map(|(u, r)| r.mean + r.stddev * u).collect()
    }

    pub fn to_delta(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.problem.uncertains)
            .map(|(y, v)| (2.0 * y - (v.lower + v.upper)) / (v.upper - v.lower))
            .collect()
    }

    pub fn from_delta(&self, delta: &[f64]) -> Vec<f64> {
        delta
            .iter()
            .zip(&self.problem.uncertains)
            .map(|(d, v)| 0.5 * (v.lower + v.upper) + 0.5 * (v.upper - v.lower) * d)
            .collect()
    }

    pub fn evaluate(&self, u: &[f64], delta: &[f64]) -> f64 {
        self.problem.evaluate(&self.from_u(u), &self.from_delta(delta))
    }

    /// Evaluates at a stacked point `ω = (u, δ)`.
    pub fn evaluate_omega(&self, omega: &[f64]) -> f64 {
        let m = self.m();
        self.evaluate(&omega[..m], &omega[m..])
    }

    /// `(∂f/∂u, ∂f/∂δ)`: the analytic gradient chained through the transforms
    /// when available, otherwise central differences with step
    /// `fd_step · max(1, |coordinate|)`.
    pub fn gradient(&self, u: &[f64], delta: &[f64]) -> (Vec<f64>, Vec<f64>) {
        if let Some(g) = &self.problem.gradient {
            let (gx, gy) = g(&self.from_u(u), &self.from_delta(delta));
            let gu = gx.iter().zip(&self.problem.randoms).map(|(g, r)| g * r.stddev).collect();
            let gd = gy
                .iter()
                .zip(&self.problem.uncertains)
                .map(|(g, v)| g * 0.5 * (v.upper - v.lower))
                .collect();
            return (gu, gd);
        }
        let mut omega: Vec<f64> = u.iter().chain(delta).copied().collect();
        let m = u.len();
        let mut grad = vec![0.0; omega.len()];
        for i in 0..omega.len() {
            let c = omega[i];
            let h = self.fd_step * c.abs().max(1.0);
            omega[i] = c + h;
            let fp = self.evaluate(&omega[..m], &omega[m..]);
            omega[i] = c - h;
            let fm = self.evaluate(&omega[..m], &omega[m..]);
            omega[i] = c;
            grad[i] = (fp - fm) / (2.0 * h);
        }
        let gd = grad.split_off(m);
        (grad, gd)
    }

    pub fn gradient_omega(&self, omega: &[f64]) -> Vec<f64> {
        let m = self.m();
        let (mut gu, gd) = self.gradient(&omega[..m], &omega[m..]);
        gu.extend(gd);
        gu
    }
}

/// `R_H = ∫ M{f(η, τ) > 0} dΨ(η)` by tensor quadrature over the random
/// inputs (at most three).
pub fn reliability_reference(problem: &HybridProblem, quad_nodes: usize) -> Result<f64> {
    let profile = problem.monotonicity(DEFAULT_FD_STEP)?;
    let f = |x: &[f64], y: &[f64]| problem.evaluate(x, y);
    chance::chance_reliability(&f, &problem.prob_dists()?, &problem.unc_dists()?, &profile, 0.0, quad_nodes)
}

/// `Pr{f(η) > 0}` for a problem without uncertain variables.
pub fn degenerate_random(problem: &HybridProblem) -> Result<f64> {
    if problem.n() != 0 {
        return Err(HraError::InvalidParameter(format!(
            "degenerate_random needs n = 0, problem has n = {}",
            problem.n()
        )));
    }
    let f = |x: &[f64], y: &[f64]| problem.evaluate(x, y);
    chance::chance_reliability(&f, &problem.prob_dists()?, &[], &MonotonicityProfile::new(vec![]), 0.0, 8)
}

/// `M{f(τ) > 0}` for a problem without random variables. A profile with an
/// undetermined direction is evaluated by the sup formula on a dense grid.
pub fn degenerate_uncertain(problem: &HybridProblem) -> Result<f64> {
    if problem.m() != 0 {
        return Err(HraError::InvalidParameter(format!(
            "degenerate_uncertain needs m = 0, problem has m = {}",
            problem.m()
        )));
    }
    let profile = problem.monotonicity(DEFAULT_FD_STEP)?;
    let dists = problem.unc_dists()?;
    let f = |x: &[f64], y: &[f64]| problem.evaluate(x, y);
    if profile.is_fully_known() {
        Ok(chance::alpha_at_limit_state(&f, &[], &dists, &profile, 1e-12)?.alpha)
    } else {
        let grid = match dists.len() {
            1 => 10_001,
            2 => 1001,
            _ => 101,
        };
        chance::alpha_sup_formula(&f, &[], &dists, &profile, grid)
    }
}
