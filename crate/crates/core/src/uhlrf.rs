//! Single-loop design-point search: an uncertainty-analysis (UA) step over
//! `δ` for fixed `u`, then an HLRF probability-analysis (PA) step over `u`
//! for fixed `δ`, repeated until the stacked point stops moving.

use rayon::prelude::*;

use crate::error::{HraError, Result};
use crate::model::StandardizedProblem;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SolverSettings {
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Grid points per dimension for the UA step when `n <= 3`.
    pub ua_grid: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { epsilon: 1e-6, max_iterations: 100, ua_grid: 21 }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(HraError::InvalidParameter(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(HraError::InvalidParameter("max_iterations must be >= 1".into()));
        }
        if self.ua_grid < 2 {
            return Err(HraError::InvalidParameter("ua_grid must be >= 2".into()));
        }
        Ok(())
    }
}

/// One accepted iteration of the single loop.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub beta: f64,
    pub step_norm: f64,
    pub f_value: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DesignPoint {
    pub u_star: Vec<f64>,
    pub delta_star: Vec<f64>,
    /// `‖(u*, δ*)‖`.
    pub beta: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

impl DesignPoint {
    pub fn omega(&self) -> Vec<f64> {
        self.u_star.iter().chain(&self.delta_star).copied().collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimum-norm point of `{δ ∈ [-1, 1]^n : g·δ = c}`. The minimizer is
/// `clamp(λ g)` for the scalar `λ` solving the (monotone) constraint; when
/// `|c| > Σ|g_i|` the plane misses the box and the nearest corner is returned.
fn min_norm_on_plane(g: &[f64], c: f64) -> Vec<f64> {
    min_norm_on_plane_masked(g, c, &vec![true; g.len()])
}

/// As [`min_norm_on_plane`], with only the coordinates flagged in `bounded`
/// restricted to `[-1, 1]`.
fn min_norm_on_plane_masked(g: &[f64], c: f64, bounded: &[bool]) -> Vec<f64> {
    let project = |lambda: f64| -> Vec<f64> {
        g.iter()
            .zip(bounded)
            .map(|(x, b)| if *b { (lambda * x).clamp(-1.0, 1.0) } else { lambda * x })
            .collect()
    };
    let unbounded_reach = g.iter().zip(bounded).any(|(x, b)| !*b && *x != 0.0);
    let reach: f64 = g.iter().map(|x| x.abs()).sum();
    if reach == 0.0 {
        return vec![0.0; g.len()];
    }
    if !unbounded_reach && c.abs() >= reach {
        return g.iter().map(|x| if *x == 0.0 { 0.0 } else { x.signum() * c.signum() }).collect();
    }
    let phi = |lambda: f64| dot(g, &project(lambda));
    let gmin = g.iter().filter(|x| **x != 0.0).map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let mut span = 1.0 / gmin;
    while unbounded_reach && phi(span * c.signum()).abs() < c.abs() {
        span *= 2.0;
    }
    let (mut lo, mut hi) = if c >= 0.0 { (0.0, span) } else { (-span, 0.0) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    project(0.5 * (lo + hi))
}

struct UaContext<'a> {
    problem: &'a StandardizedProblem,
    u: &'a [f64],
}

impl UaContext<'_> {
    fn f(&self, delta: &[f64]) -> f64 {
        self.problem.evaluate(self.u, delta)
    }

    fn grad(&self, delta: &[f64]) -> Vec<f64> {
        self.problem.gradient(self.u, delta).1
    }

    /// Projected HLRF onto the box-restricted zero set. Returns the final
    /// point and whether it satisfies `|f| <= tol`.
    fn project_to_zero_set(&self, start: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, bool) {
        let mut delta = start.to_vec();
        for _ in 0..max_iter {
            let f = self.f(&delta);
            let g = self.grad(&delta);
            if norm(&g) == 0.0 {
                break;
            }
            let next = min_norm_on_plane(&g, dot(&g, &delta) - f);
            let step = norm(&next.iter().zip(&delta).map(|(a, b)| a - b).collect::<Vec<_>>());
            delta = next;
            if step <= 1e-13 {
                break;
            }
        }
        let ok = self.f(&delta).abs() <= tol;
        (delta, ok)
    }

    /// Gauss–Newton steps on `f²` with clamping and backtracking.
    fn descend_abs(&self, start: &[f64], max_iter: usize) -> Vec<f64> {
        let mut delta = start.to_vec();
        let mut fcur = self.f(&delta);
        for _ in 0..max_iter {
            let g = self.grad(&delta);
            let gg = dot(&g, &g);
            if gg == 0.0 || fcur == 0.0 {
                break;
            }
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand: Vec<f64> =
                    delta.iter().zip(&g).map(|(d, gi)| (d - t * fcur * gi / gg).clamp(-1.0, 1.0)).collect();
                let fc = self.f(&cand);
                if fc.abs() < fcur.abs() {
                    delta = cand;
                    fcur = fc;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        delta
    }
}

fn feasibility_tol(f0: f64) -> f64 {
    1e-10 * f0.abs().max(1.0)
}

/// UA step: the point of `[-1, 1]^n` closest to the origin on
/// `f(u_fixed, ·) = 0`, or the box minimizer of `|f|` when the zero set does
/// not meet the box.
pub fn ua_step(std_problem: &StandardizedProblem, u_fixed: &[f64], settings: &SolverSettings) -> Vec<f64> {
    let n = std_problem.n();
    if n == 0 {
        return Vec::new();
    }
    let ctx = UaContext { problem: std_problem, u: u_fixed };
    let f0 = ctx.f(&vec![0.0; n]);
    let tol = feasibility_tol(f0);
    if n <= 3 {
        ua_grid_search(&ctx, n, settings.ua_grid.max(2), tol)
    } else {
        let (delta, ok) = ctx.project_to_zero_set(&vec![0.0; n], tol, 50);
        if ok {
            delta
        } else {
            ctx.descend_abs(&delta, 50)
        }
    }
}

fn ua_grid_search(ctx: &UaContext<'_>, n: usize, g: usize, tol: f64) -> Vec<f64> {
    let axis: Vec<f64> = (0..g).map(|i| -1.0 + 2.0 * i as f64 / (g - 1) as f64).collect();
    let total = g.pow(n as u32);
    let point = |mut k: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                let v = axis[k % g];
                k /= g;
                v
            })
            .collect()
    };
    let values: Vec<f64> = (0..total).into_par_iter().map(|k| ctx.f(&point(k))).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (k, &fp) in values.iter().enumerate() {
        let mut stride = 1;
        let mut rest = k;
        for axis_idx in 0..n {
            let i = rest % g;
            rest /= g;
            if i + 1 < g {
                let fq = values[k + stride];
                if (fp > 0.0) != (fq > 0.0) {
                    let t = fp / (fp - fq);
                    let mut p = point(k);
                    p[axis_idx] += t * (axis[i + 1] - axis[i]);
                    let r = norm(&p);
                    if best.as_ref().is_none_or(|(b, _)| r < *b) {
                        best = Some((r, p));
                    }
                }
            }
            stride *= g;
        }
    }
    match best {
        Some((r, crossing)) => {
            let (refined, ok) = ctx.project_to_zero_set(&crossing, tol, 50);
            if ok && norm(&refined) <= r + 1e-12 {
                refined
            } else {
                crossing
            }
        }
        None => {
            let k = values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(k, _)| k)
                .expect("non-empty grid");
            ctx.descend_abs(&point(k), 50)
        }
    }
}

/// PA step: one HLRF update over `u` with `δ` held fixed. Returns the new
/// point and the signed index `β = (f - ∇_u f·u_prev)/‖∇_u f‖`, so that
/// `u_next = -β ∇_u f/‖∇_u f‖`.
pub fn pa_step(std_problem: &StandardizedProblem, u_prev: &[f64], delta_fixed: &[f64]) -> Result<(Vec<f64>, f64)> {
    let f = std_problem.evaluate(u_prev, delta_fixed);
    let (gu, _) = std_problem.gradient(u_prev, delta_fixed);
    let gnorm = norm(&gu);
    if !(gnorm >= 1e-12) {
        return Err(HraError::DegenerateGradient { norm: gnorm });
    }
    let beta = (f - dot(&gu, u_prev)) / gnorm;
    let u_next = gu.iter().map(|g| -beta * g / gnorm).collect();
    Ok((u_next, beta))
}

/// Design-point search from the origin.
///
/// Phase one alternates [`ua_step`] and [`pa_step`] until
/// `‖ω_k − ω_{k−1}‖ <= ε`. Block-wise minimization can stall on the limit
/// state away from the minimum-norm point, so phase two continues with joint
/// projected-HLRF steps over `ω = (u, δ)` (box on the `δ` block); its result
/// replaces the phase-one point when it is feasible and no farther from the
/// origin. Without convergence the iterate with the smallest `|f|` is
/// returned with `converged = false`.
pub fn find_design_point(std_problem: &StandardizedProblem, settings: &SolverSettings) -> Result<DesignPoint> {
    settings.validate()?;
    let (m, n) = (std_problem.m(), std_problem.n());
    if m == 0 {
        return Err(HraError::InvalidParameter(
            "design-point search needs at least one random variable".into(),
        ));
    }
    let mut run = Run::new(std_problem);
    let f_scale = std_problem.evaluate(&vec![0.0; m], &vec![0.0; n]).abs().max(1.0);
    let mut u = vec![0.0; m];
    let mut delta = vec![0.0; n];
    let mut slow_steps = 0;
    let mut prev_step = f64::INFINITY;
    while run.trace.len() < settings.max_iterations {
        let delta_new = ua_step(std_problem, &u, settings);
        let (u_new, _) = pa_step(std_problem, &u, &delta_new)?;
        let step = run.record(&u, &delta, &u_new, &delta_new);
        u = u_new;
        delta = delta_new;
        if step <= settings.epsilon {
            let polished = polish(std_problem, settings, &mut run, &u, &delta, f_scale);
            let (u, delta) = polished.unwrap_or((u, delta));
            return Ok(run.finish(u, delta, true));
        }
        let feasible = std_problem.evaluate(&u, &delta).abs() <= 1e-8 * f_scale;
        slow_steps = if feasible && step > 0.5 * prev_step { slow_steps + 1 } else { 0 };
        prev_step = step;
        if slow_steps >= 3 {
            if let Some((u, delta)) = polish(std_problem, settings, &mut run, &u, &delta, f_scale) {
                return Ok(run.finish(u, delta, true));
            }
            slow_steps = 0;
        }
    }
    log::warn!("design-point search did not converge in {} iterations", settings.max_iterations);
    let (u, delta) = run.best.clone().expect("at least one iteration");
    Ok(run.finish(u, delta, false))
}

/// Joint projected HLRF over ω = (u, δ) with δ held in its box, started from
/// an alternating-loop point. Returns the refined point if it converged onto
/// the limit state without moving farther from the origin.
fn polish(
    std_problem: &StandardizedProblem,
    settings: &SolverSettings,
    run: &mut Run<'_>,
    u: &[f64],
    delta: &[f64],
    f_scale: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let m = u.len();
    let start_norm = (dot(u, u) + dot(delta, delta)).sqrt();
    let bounded: Vec<bool> = (0..m + delta.len()).map(|i| i >= m).collect();
    let mut omega: Vec<f64> = u.iter().chain(delta).copied().collect();
    while run.trace.len() < settings.max_iterations {
        let g = std_problem.gradient_omega(&omega);
        let f = std_problem.evaluate_omega(&omega);
        if norm(&g) < 1e-12 {
            return None;
        }
        let next = min_norm_on_plane_masked(&g, dot(&g, &omega) - f, &bounded);
        let moved = norm(&next.iter().zip(&omega).map(|(a, b)| a - b).collect::<Vec<_>>());
        if moved <= settings.epsilon {
            // negligible moves are not recorded as iterations
            let f_end = std_problem.evaluate_omega(&next);
            if f_end.abs() <= 1e-8 * f_scale && norm(&next) <= start_norm + 1e-12 {
                let mut u_star = next;
                let delta_star = u_star.split_off(m);
                return Some((u_star, delta_star));
            }
            log::debug!("joint refinement rejected; keeping the alternating-loop point");
            return None;
        }
        run.record(&omega[..m], &omega[m..], &next[..m], &next[m..]);
        omega = next;
    }
    None
}

struct Run<'a> {
    problem: &'a StandardizedProblem,
    trace: Vec<IterationRecord>,
    best: Option<(Vec<f64>, Vec<f64>)>,
    best_f: f64,
}

impl<'a> Run<'a> {
    fn new(problem: &'a StandardizedProblem) -> Self {
        Self { problem, trace: Vec::new(), best: None, best_f: f64::INFINITY }
    }

    /// Appends a trace record for the move `(u, δ) → (u_new, δ_new)` and
    /// returns the step length.
    fn record(&mut self, u: &[f64], delta: &[f64], u_new: &[f64], delta_new: &[f64]) -> f64 {
        let step = u_new
            .iter()
            .zip(u)
            .chain(delta_new.iter().zip(delta))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let f_value = self.problem.evaluate(u_new, delta_new);
        let beta = (dot(u_new, u_new) + dot(delta_new, delta_new)).sqrt();
        if let Some(prev) = self.trace.last() {
            if beta > prev.beta * (1.0 + 1e-9) + 1e-12 && prev.f_value.abs() <= 1e-8 {
                log::debug!("beta increased from {} to {beta} after a feasible iterate", prev.beta);
            }
        }
        let iteration = self.trace.len() + 1;
        log::trace!("uhlrf iteration {iteration}: beta={beta:.9} step={step:.3e} f={f_value:.3e}");
        self.trace.push(IterationRecord { iteration, beta, step_norm: step, f_value });
        if f_value.abs() < self.best_f {
            self.best_f = f_value.abs();
            self.best = Some((u_new.to_vec(), delta_new.to_vec()));
        }
        step
    }

    fn finish(self, u_star: Vec<f64>, delta_star: Vec<f64>, converged: bool) -> DesignPoint {
        let beta = (dot(&u_star, &u_star) + dot(&delta_star, &delta_star)).sqrt();
        DesignPoint { u_star, delta_star, beta, iterations: self.trace.len(), converged, trace: self.trace }
    }
}
