//! Chance-measure operational law for uncertain random variables
//! `ξ = f(η_1..η_m, τ_1..τ_n)`.
//!
//! For fixed random inputs the uncertain part has an uncertainty
//! distribution that is found either as the root `α` of an equation in the
//! inverse uncertainty distributions (monotone `f`, regular `Υ`) or as a
//! supremum over the zero set of `f`. Integrating over the random inputs
//! gives the chance distribution / chance measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distributions::{ProbabilityDistribution, UncertaintyDistribution};
use crate::error::{HraError, Result};
use crate::quadrature::adaptive_gk;

/// Limit-state callable over `(random inputs, uncertain inputs)`.
pub type LsfRef<'a> = &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync);

/// Bisection tolerance on `α`.
pub const ALPHA_TOL: f64 = 1e-10;
const MAX_BISECTION: usize = 200;
const PRESCAN_POINTS: usize = 11;
/// Standard-normal truncation used by the reference quadrature.
const NORMAL_SPAN: f64 = 8.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unknown,
}

/// Direction of `f` in each uncertain variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityProfile(Vec<Monotonicity>);

impl MonotonicityProfile {
    pub fn new(entries: Vec<Monotonicity>) -> Self {
        Self(entries)
    }

    pub fn all(n: usize, m: Monotonicity) -> Self {
        Self(vec![m; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Monotonicity] {
        &self.0
    }

    /// False when any entry is `Unknown`; such profiles must use
    /// [`alpha_sup_formula`].
    pub fn is_fully_known(&self) -> bool {
        self.0.iter().all(|m| *m != Monotonicity::Unknown)
    }

    /// Classifies each uncertain variable by the sign of its central
    /// finite-difference partial at `at`, then re-checks the sign at five
    /// random points of the support box. Disagreement gives `Unknown`; a
    /// variable with zero partial everywhere is labelled `Increasing` (the
    /// label is irrelevant for it).
    pub fn detect(
        f: LsfRef<'_>,
        fixed_randoms: &[f64],
        unc_dists: &[UncertaintyDistribution],
        at: &[f64],
        rel_step: f64,
        seed: u64,
    ) -> Self {
        let n = unc_dists.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = vec![at.to_vec()];
        for _ in 0..5 {
            points.push(
                unc_dists
                    .iter()
                    .map(|d| {
                        let (lo, hi) = d.bounds();
                        lo + (hi - lo) * rng.random::<f64>()
                    })
                    .collect(),
            );
        }
        let entries = (0..n)
            .map(|j| {
                let mut sign = 0i8;
                for p in &points {
                    let h = rel_step * p[j].abs().max(1.0);
                    let mut hi = p.clone();
                    let mut lo = p.clone();
                    hi[j] += h;
                    lo[j] -= h;
                    let df = f(fixed_randoms, &hi) - f(fixed_randoms, &lo);
                    let s = if df > 0.0 {
                        1
                    } else if df < 0.0 {
                        -1
                    } else {
                        0
                    };
                    if s == 0 {
                        continue;
                    }
                    if sign == 0 {
                        sign = s;
                    } else if sign != s {
                        return Monotonicity::Unknown;
                    }
                }
                if sign < 0 {
                    Monotonicity::Decreasing
                } else {
                    Monotonicity::Increasing
                }
            })
            .collect();
        Self(entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum AlphaStatus {
    InteriorRoot,
    ForcedZero,
    ForcedOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRoot {
    pub alpha: f64,
    pub status: AlphaStatus,
}

impl AlphaRoot {
    fn zero() -> Self {
        Self { alpha: 0.0, status: AlphaStatus::ForcedZero }
    }

    fn one() -> Self {
        Self { alpha: 1.0, status: AlphaStatus::ForcedOne }
    }
}

fn check_inputs(
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
) -> Result<()> {
    if profile.len() != unc_dists.len() {
        return Err(HraError::InvalidParameter(format!(
            "profile has {} entries for {} uncertain variables",
            profile.len(),
            unc_dists.len()
        )));
    }
    if !profile.is_fully_known() {
        return Err(HraError::InvalidParameter(
            "monotonicity profile has unknown entries; use the sup formula".into(),
        ));
    }
    if let Some(d) = unc_dists.iter().find(|d| !d.is_regular()) {
        return Err(HraError::InvalidParameter(format!("{d:?} is not regular")));
    }
    Ok(())
}

/// Root of a non-increasing `h` on `[0, 1]`, with the endpoint conventions
/// `h(0) <= 0 → 0` and `h(1) > 0 → 1`.
fn solve_decreasing<H: Fn(f64) -> f64>(h: H, tol: f64) -> Result<AlphaRoot> {
    let scan: Vec<(f64, f64)> = (0..PRESCAN_POINTS)
        .map(|i| {
            let a = i as f64 / (PRESCAN_POINTS - 1) as f64;
            (a, h(a))
        })
        .collect();
    let sign_changes = scan.windows(2).filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0)).count();
    if sign_changes > 1 || scan.iter().any(|(_, v)| v.is_nan()) {
        return Err(HraError::AmbiguousRoot { sign_changes, trace: scan });
    }
    if scan[0].1 <= 0.0 {
        return Ok(AlphaRoot::zero());
    }
    if scan[PRESCAN_POINTS - 1].1 > 0.0 {
        return Ok(AlphaRoot::one());
    }
    let k = scan.windows(2).position(|w| w[0].1 > 0.0 && w[1].1 <= 0.0).expect("one sign change");
    let (mut a, mut b) = (scan[k].0, scan[k + 1].0);
    for _ in 0..MAX_BISECTION {
        if b - a <= ALPHA_TOL {
            break;
        }
        let mid = 0.5 * (a + b);
        let v = h(mid);
        if v > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let alpha = 0.5 * (a + b);
    let residual = h(alpha);
    if residual.abs() > tol {
        log::debug!("alpha root {alpha}: residual {residual:e} exceeds tol {tol:e} (discontinuous f?)");
    }
    Ok(AlphaRoot { alpha, status: AlphaStatus::InteriorRoot })
}

/// `M{f(η, τ) > 0}` for fixed random inputs `η`.
///
/// Solves `f(η, Υ_inc⁻¹(1-α), Υ_dec⁻¹(α)) = 0`. The left-hand side is
/// non-increasing in `α`; if it is negative for every `α` the root is set to
/// zero, if positive for every `α` to one.
pub fn alpha_at_limit_state(
    f: LsfRef<'_>,
    fixed_randoms: &[f64],
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
    tol: f64,
) -> Result<AlphaRoot> {
    alpha_at_threshold(f, fixed_randoms, unc_dists, profile, 0.0, tol)
}

/// `M{f(η, τ) > x}`: [`alpha_at_limit_state`] applied to `f - x`.
pub fn alpha_at_threshold(
    f: LsfRef<'_>,
    fixed_randoms: &[f64],
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
    x: f64,
    tol: f64,
) -> Result<AlphaRoot> {
    check_inputs(unc_dists, profile)?;
    let entries = profile.entries();
    solve_decreasing(
        |alpha| {
            let y: Vec<f64> = unc_dists
                .iter()
                .zip(entries)
                .map(|(d, m)| match m {
                    Monotonicity::Decreasing => d.inverse(alpha),
                    _ => d.inverse(1.0 - alpha),
                })
                .collect();
            f(fixed_randoms, &y) - x
        },
        tol,
    )
}

/// `M{f(η, τ) <= x}`, the uncertainty distribution of `f` at `x` for fixed
/// random inputs.
///
/// Solves `f(η, Υ_inc⁻¹(α), Υ_dec⁻¹(1-α)) = x`, whose left-hand side is
/// non-decreasing in `α`; `f > x` everywhere gives zero and `f <= x`
/// everywhere gives one.
pub fn alpha_distribution(
    f: LsfRef<'_>,
    fixed_randoms: &[f64],
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
    x: f64,
    tol: f64,
) -> Result<AlphaRoot> {
    check_inputs(unc_dists, profile)?;
    let entries = profile.entries();
    // g(α) = x - f(...) is non-increasing; its root is the same α.
    let root = solve_decreasing(
        |alpha| {
            let y: Vec<f64> = unc_dists
                .iter()
                .zip(entries)
                .map(|(d, m)| match m {
                    Monotonicity::Decreasing => d.inverse(1.0 - alpha),
                    _ => d.inverse(alpha),
                })
                .collect();
            // strict `<=` event: shift the sign so that equality counts as "≤ x"
            let v = f(fixed_randoms, &y) - x;
            if v == 0.0 {
                f64::MIN_POSITIVE
            } else {
                -v
            }
        },
        tol,
    )?;
    // `solve_decreasing` reports g(0) <= 0 (f > x everywhere) as zero and
    // g(1) > 0 (f <= x everywhere) as one, matching the distribution reading.
    Ok(root)
}

/// Grid approximation of `sup_{f = 0} min(min_inc (1 - Υ_i), min_dec Υ_i)`.
///
/// The zero set is located by sign changes between neighbouring grid points
/// along each axis and linear interpolation. `Unknown` profile entries take
/// their direction from the local change of `f` along that axis. With no
/// crossing, the result is 1 when `f > 0` on the whole grid and 0 otherwise.
pub fn alpha_sup_formula(
    f: LsfRef<'_>,
    fixed_randoms: &[f64],
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
    grid_per_var: usize,
) -> Result<f64> {
    let n = unc_dists.len();
    if n > 3 {
        return Err(HraError::UnsupportedDimension(format!(
            "sup-formula grid supports at most 3 uncertain variables, got {n}"
        )));
    }
    if grid_per_var < 101 {
        return Err(HraError::InvalidParameter(format!(
            "sup-formula grid needs at least 101 points per variable, got {grid_per_var}"
        )));
    }
    if profile.len() != n {
        return Err(HraError::InvalidParameter("profile length mismatch".into()));
    }
    if n == 0 {
        return Ok(if f(fixed_randoms, &[]) > 0.0 { 1.0 } else { 0.0 });
    }
    let g = grid_per_var;
    let axes: Vec<Vec<f64>> = unc_dists
        .iter()
        .map(|d| {
            let (lo, hi) = d.bounds();
            (0..g).map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64).collect()
        })
        .collect();
    let total = g.pow(n as u32);
    let index = |mut k: usize| -> Vec<usize> {
        let mut idx = vec![0; n];
        for slot in idx.iter_mut() {
            *slot = k % g;
            k /= g;
        }
        idx
    };
    let point = |idx: &[usize]| -> Vec<f64> { idx.iter().enumerate().map(|(j, &i)| axes[j][i]).collect() };
    let values: Vec<f64> = (0..total).map(|k| f(fixed_randoms, &point(&index(k)))).collect();
    let stride: Vec<usize> = (0..n).map(|j| g.pow(j as u32)).collect();

    let mut best: Option<f64> = None;
    for k in 0..total {
        let idx = index(k);
        for axis in 0..n {
            if idx[axis] + 1 >= g {
                continue;
            }
            let fp = values[k];
            let fq = values[k + stride[axis]];
            if (fp > 0.0) == (fq > 0.0) {
                continue;
            }
            let t = fp / (fp - fq);
            let mut tau = point(&idx);
            tau[axis] += t * (axes[axis][idx[axis] + 1] - axes[axis][idx[axis]]);
            let mut level = f64::INFINITY;
            for (j, d) in unc_dists.iter().enumerate() {
                let dir = match profile.entries()[j] {
                    Monotonicity::Unknown => local_direction(&values, &idx, j, stride[j], g, k),
                    known => known,
                };
                let u = d.cdf(tau[j]);
                let term = if dir == Monotonicity::Decreasing { u } else { 1.0 - u };
                level = level.min(term);
            }
            best = Some(best.map_or(level, |b: f64| b.max(level)));
        }
    }
    Ok(match best {
        Some(v) => v,
        None if values.iter().all(|v| *v > 0.0) => 1.0,
        None => 0.0,
    })
}

fn local_direction(values: &[f64], idx: &[usize], axis: usize, stride: usize, g: usize, k: usize) -> Monotonicity {
    let (lo, hi) = if idx[axis] + 1 < g { (k, k + stride) } else { (k - stride, k) };
    if values[hi] < values[lo] {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Increasing
    }
}

/// Integrates `inner` against independent normal inputs by nested adaptive
/// Gauss–Kronrod over `[-8.5, 8.5]` standard deviations, starting from
/// `panels` panels per dimension.
fn integrate_over_normals<I>(normals: &[(f64, f64)], panels: usize, inner: &I) -> Result<f64>
where
    I: Fn(&[f64]) -> Result<f64>,
{
    fn recurse<I: Fn(&[f64]) -> Result<f64>>(
        normals: &[(f64, f64)],
        prefix: &mut Vec<f64>,
        panels: usize,
        inner: &I,
        failure: &mut Option<HraError>,
    ) -> f64 {
        let depth = prefix.len();
        if depth == normals.len() {
            return match inner(prefix) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
        }
        let (mean, sd) = normals[depth];
        let remaining = normals.len() - depth;
        let tol = 1e-10 * 10f64.powi(remaining as i32 - 1);
        let est = adaptive_gk(
            |z| {
                if failure.is_some() {
                    return 0.0;
                }
                let weight = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
                prefix.push(mean + sd * z);
                let v = recurse(normals, prefix, panels, inner, failure);
                prefix.pop();
                weight * v
            },
            -NORMAL_SPAN,
            NORMAL_SPAN,
            panels,
            tol,
            4000,
        );
        est.value
    }
    let mut failure = None;
    let v = recurse(normals, &mut Vec::with_capacity(normals.len()), panels, inner, &mut failure);
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn normal_params(prob_dists: &[ProbabilityDistribution]) -> Result<Vec<(f64, f64)>> {
    if prob_dists.len() > 3 {
        return Err(HraError::UnsupportedDimension(format!(
            "tensor quadrature reference supports at most 3 random inputs, got {}",
            prob_dists.len()
        )));
    }
    prob_dists
        .iter()
        .map(|d| match *d {
            ProbabilityDistribution::Normal { mean, stddev } => Ok((mean, stddev)),
            other => Err(HraError::InvalidParameter(format!(
                "reference quadrature integrates over normal inputs only, got {other:?}"
            ))),
        })
        .collect()
}

/// Runs the quadrature at `panels` and `2 * panels` and rejects a relative
/// change above `1e-6` (relative to `max(|I|, 1e-4)`).
fn doubled<I>(normals: &[(f64, f64)], panels: usize, inner: &I) -> Result<f64>
where
    I: Fn(&[f64]) -> Result<f64>,
{
    if normals.is_empty() {
        return inner(&[]);
    }
    let coarse = integrate_over_normals(normals, panels.max(1), inner)?;
    let fine = integrate_over_normals(normals, 2 * panels.max(1), inner)?;
    let change = (fine - coarse).abs() / fine.abs().max(1e-4);
    if change > 1e-6 {
        return Err(HraError::Accuracy(format!(
            "chance quadrature changed by {change:e} on node doubling ({coarse} -> {fine})"
        )));
    }
    Ok(fine)
}

/// Chance distribution `Φ(x) = Ch{f <= x} = ∫ M{f(η, τ) <= x} dΨ(η)`.
pub fn chance_distribution(
    f: LsfRef<'_>,
    prob_dists: &[ProbabilityDistribution],
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
    x: f64,
    quad_nodes: usize,
) -> Result<f64> {
    let normals = normal_params(prob_dists)?;
    check_inputs(unc_dists, profile)?;
    doubled(&normals, quad_nodes, &|eta: &[f64]| {
        alpha_distribution(f, eta, unc_dists, profile, x, 1e-12).map(|r| r.alpha)
    })
}

/// Chance measure `Ch{f > x} = ∫ M{f(η, τ) > x} dΨ(η)`; at `x = 0` this is
/// the hybrid reliability.
pub fn chance_reliability(
    f: LsfRef<'_>,
    prob_dists: &[ProbabilityDistribution],
    unc_dists: &[UncertaintyDistribution],
    profile: &MonotonicityProfile,
    x: f64,
    quad_nodes: usize,
) -> Result<f64> {
    let normals = normal_params(prob_dists)?;
    check_inputs(unc_dists, profile)?;
    doubled(&normals, quad_nodes, &|eta: &[f64]| {
        alpha_at_threshold(f, eta, unc_dists, profile, x, 1e-12).map(|r| r.alpha)
    })
}
