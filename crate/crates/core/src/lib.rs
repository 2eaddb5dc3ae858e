//! Hybrid reliability analysis for limit-state functions that mix random
//! variables (aleatory uncertainty) with uncertain variables described by
//! uncertainty distributions (epistemic uncertainty).
//!
//! The hybrid reliability `R_H = Ch{f(X, Y) > 0}` is a chance measure. The
//! production path is:
//!
//! ```text
//! HybridProblem ── standardize ──> StandardizedProblem
//!        │                               │
//!        │                       find_design_point (UA/PA single loop)
//!        │                               │
//!        │                            reduce ──> ReducedLsf (d, D)
//!        │                                          │
//!        │                        reliability_interval over the σ schedule
//!        │                                          │
//!        └── estimate_failure (Monte Carlo oracle)  └──> [R_lo, R_hi]
//! ```
//!
//! `chance` and `model::reliability_reference` provide an independent
//! tensor-quadrature route through the chance-measure operational law for
//! small problems.

pub mod bench;
pub mod chance;
pub mod cli;
pub mod config;
pub mod distributions;
pub mod error;
pub mod integrator;
pub mod mcs;
pub mod model;
pub mod pipeline;
pub mod polar;
pub mod quadrature;
pub mod report;
pub mod uhlrf;

pub use error::{HraError, Result};
