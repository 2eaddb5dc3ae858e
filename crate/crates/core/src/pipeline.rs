//! End-to-end analysis: standardize, find the design point, reduce, and
//! integrate over the σ schedule. Problems without random variables are
//! evaluated directly by the uncertain-only operational law.

use crate::error::Result;
use crate::integrator::{reliability_interval, ReliabilityInterval, SigmaSchedule, DEFAULT_LEVELS, DEFAULT_QUAD_NODES};
use crate::model::{degenerate_uncertain, standardize, HybridProblem, DEFAULT_FD_STEP};
use crate::polar::{reduce, ReducedLsf};
use crate::uhlrf::{find_design_point, DesignPoint, SolverSettings};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AnalysisSettings {
    pub solver: SolverSettings,
    pub alpha_levels: usize,
    pub quad_nodes: usize,
    pub fd_step: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            solver: SolverSettings::default(),
            alpha_levels: DEFAULT_LEVELS,
            quad_nodes: DEFAULT_QUAD_NODES,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Analysis {
    /// Absent for problems without random variables.
    pub design_point: Option<DesignPoint>,
    pub reduced: Option<ReducedLsf>,
    pub interval: ReliabilityInterval,
}

pub fn analyze(problem: &HybridProblem, settings: &AnalysisSettings) -> Result<Analysis> {
    if problem.m() == 0 {
        let r = degenerate_uncertain(problem)?;
        return Ok(Analysis {
            design_point: None,
            reduced: None,
            interval: ReliabilityInterval { r_lo: r, r_hi: r, f_lo: 1.0 - r, f_hi: 1.0 - r, curve: vec![(0.0, r)] },
        });
    }
    let std_problem = standardize(problem.clone()).with_fd_step(settings.fd_step)?;
    let design_point = find_design_point(&std_problem, &settings.solver)?;
    let reduced = reduce(&std_problem, &design_point)?;
    let schedule = SigmaSchedule::uniform(problem.n(), settings.alpha_levels)?;
    let interval = reliability_interval(&reduced, &schedule, settings.quad_nodes)?;
    Ok(Analysis { design_point: Some(design_point), reduced: Some(reduced), interval })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::case_linear;
    use crate::model::{Lsf, UncertainVariable};
    use std::sync::Arc;

    #[test]
    fn linear_five_five() {
        let c = case_linear(5, 5).unwrap();
        let a = analyze(&c.problem, &AnalysisSettings::default()).unwrap();
        let red = a.reduced.unwrap();
        assert!((red.d - 10f64.sqrt()).abs() < 1e-9);
        assert_eq!(a.interval.curve.len(), 21);
        assert!(a.interval.f_lo < a.interval.f_hi);
        assert_eq!(a.interval.f_lo + a.interval.r_hi, 1.0);
    }

    #[test]
    fn uncertain_only_route() {
        let lsf: Lsf = Arc::new(|_, y| 0.7 - y[0]);
        let p = HybridProblem::new("u", vec![], vec![UncertainVariable::new("t", 0.0, 1.0)], lsf).unwrap();
        let a = analyze(&p, &AnalysisSettings::default()).unwrap();
        assert!(a.design_point.is_none());
        assert!((a.interval.r_lo - 0.7).abs() < 1e-9);
    }
}
