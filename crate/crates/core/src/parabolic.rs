//! Explicit finite differences for the dissipative counterpart
//!
//! ```text
//!     V_t + V₁ V_x = QV + B V_xx
//! ```
//!
//! on a uniform periodic grid: first-order upwind advection driven by the
//! local sign of V₁, an explicit Euler source step QV, and a central second
//! difference for the diffusion BV_xx. The scheme is deliberately low-order
//! and robust — it cross-checks the characteristic solver at B = 0 and lets
//! dissipative runs continue past the inviscid gradient catastrophe.
//!
//! Stability is policed every step: the step size must stay below a safety
//! fraction of the combined advective/diffusive/source limit, and the solver
//! halves an over-large step rather than failing outright.

use rayon::prelude::*;
use thiserror::Error;

use crate::hyperbolic::{InitialProfile, SystemSpec};
use crate::numkit::NumError;

/// Relative slack when checking that the domain length is a whole number of
/// grid cells and when landing on snapshot times.
pub const GRID_FIT_RTOL: f64 = 1e-9;

/// How many times one step may be halved to satisfy the stability bound
/// before the solver gives up. 2⁻⁴⁰ ≈ 1e-12 of the requested step: if the
/// stable step is that much smaller, the run is hopeless at this resolution.
pub const MAX_DT_HALVINGS: u32 = 40;

#[derive(Debug, Error)]
pub enum ParabolicError {
    #[error("profile supplies {got} components but the system has {expected}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error("parameter {name} must be positive and finite, got {value}")]
    BadParameter { name: &'static str, value: f64 },
    #[error("domain length {span} is not a whole multiple of dx = {dx}")]
    DomainNotMultipleOfDx { span: f64, dx: f64 },
    #[error("the scheme needs a periodic profile; this domain has boundaries")]
    NotPeriodic,
    #[error("grid spacing is not uniform near index {index}: {step} vs expected {expected}")]
    NonUniformGrid { index: usize, step: f64, expected: f64 },
    #[error("field component {component} is non-finite at grid index {index}")]
    NonFiniteInput { component: usize, index: usize },
    #[error("snapshot times must be increasing and within [0, {t_end}]; offender: {t}")]
    BadSnapshotTime { t: f64, t_end: f64 },
    #[error(
        "stability limit {allowed} at t = {t} (step {step}) is below the requested \
         step even after {MAX_DT_HALVINGS} halvings — the run is unresolvable at this grid"
    )]
    CflExhausted { step: usize, t: f64, allowed: f64 },
    #[error("field went non-finite at step {step}, t = {t}, x = {x} (component {component})")]
    NonFiniteField { step: usize, t: f64, x: f64, component: usize },
    #[error(transparent)]
    Numerics(#[from] NumError),
}

/// Solution snapshot on a uniform periodic grid: `fields[c][j]` is component
/// c of V at `x_grid[j]`. The right domain endpoint is the periodic image of
/// the left one and carries no grid point.
#[derive(Debug, Clone)]
pub struct GridState {
    pub x_grid: Vec<f64>,
    pub fields: Vec<Vec<f64>>,
    pub t: f64,
}

impl GridState {
    /// Validates uniform spacing, consistent lengths, and finiteness.
    pub fn new(x_grid: Vec<f64>, fields: Vec<Vec<f64>>, t: f64) -> Result<Self, ParabolicError> {
        if x_grid.len() < 2 {
            return Err(ParabolicError::Numerics(NumError::InvalidArgument {
                arg: "x_grid",
                reason: "need at least two grid points".into(),
            }));
        }
        let dx = x_grid[1] - x_grid[0];
        if !(dx.is_finite() && dx > 0.0) {
            return Err(ParabolicError::BadParameter { name: "dx", value: dx });
        }
        for (i, w) in x_grid.windows(2).enumerate() {
            let step = w[1] - w[0];
            if (step - dx).abs() > GRID_FIT_RTOL * dx.max(1.0) {
                return Err(ParabolicError::NonUniformGrid { index: i, step, expected: dx });
            }
        }
        if fields.is_empty() {
            return Err(ParabolicError::Numerics(NumError::InvalidArgument {
                arg: "fields",
                reason: "need at least one component".into(),
            }));
        }
        for (c, comp) in fields.iter().enumerate() {
            if comp.len() != x_grid.len() {
                return Err(ParabolicError::Numerics(NumError::DimensionMismatch {
                    context: format!(
                        "component {c} has {} samples on a grid of {}",
                        comp.len(),
                        x_grid.len()
                    ),
                }));
            }
            for (j, v) in comp.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ParabolicError::NonFiniteInput { component: c, index: j });
                }
            }
        }
        if !t.is_finite() {
            return Err(ParabolicError::BadParameter { name: "t", value: t });
        }
        Ok(GridState { x_grid, fields, t })
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn dx(&self) -> f64 {
        self.x_grid[1] - self.x_grid[0]
    }

    /// Largest advection speed on the grid.
    pub fn max_speed(&self) -> f64 {
        self.fields[0].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Largest stable explicit step for the current state:
///
/// ```text
///     Δt_max = min( Δx / max|V₁|,  Δx² / (2 max row-sum|B|),  1 / (2‖Q‖∞) )
/// ```
///
/// Terms whose coefficient vanishes drop out; if everything vanishes the
/// state is stationary and the limit is +∞.
pub fn cfl_limits(sys: &SystemSpec, state: &GridState, dx: f64) -> f64 {
    assert!(dx.is_finite() && dx > 0.0, "cfl_limits needs dx > 0, got {dx}");
    let mut limit = f64::INFINITY;
    let speed = state.max_speed();
    if speed > 0.0 {
        limit = limit.min(dx / speed);
    }
    if let Some(b) = &sys.b {
        let row_sum = b.inf_norm();
        if row_sum > 0.0 {
            limit = limit.min(dx * dx / (2.0 * row_sum));
        }
    }
    let q_norm = sys.q.inf_norm();
    if q_norm > 0.0 {
        limit = limit.min(1.0 / (2.0 * q_norm));
    }
    limit
}

/// One explicit update of every grid point: upwind advection by the local
/// V₁, Euler source QV, central-difference diffusion BV_xx.
fn step_fields(sys: &SystemSpec, fields: &[Vec<f64>], dx: f64, dt: f64) -> Vec<Vec<f64>> {
    let n = sys.n;
    let m = fields[0].len();
    let inv_dx = 1.0 / dx;
    let inv_dx2 = inv_dx * inv_dx;

    // Point-major update in parallel, then transpose back to component-major.
    let new_points: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let jm = if j == 0 { m - 1 } else { j - 1 };
            let jp = if j == m - 1 { 0 } else { j + 1 };
            let speed = fields[0][j];
            let mut out = Vec::with_capacity(n);
            for c in 0..n {
                let here = fields[c][j];
                let upwind = if speed >= 0.0 {
                    (here - fields[c][jm]) * inv_dx
                } else {
                    (fields[c][jp] - here) * inv_dx
                };
                let mut source = 0.0;
                for (k, field) in fields.iter().enumerate() {
                    source += sys.q.get(c, k) * field[j];
                }
                let mut diffusion = 0.0;
                if let Some(b) = &sys.b {
                    for (k, field) in fields.iter().enumerate() {
                        let lap = (field[jp] - 2.0 * field[j] + field[jm]) * inv_dx2;
                        diffusion += b.get(c, k) * lap;
                    }
                }
                out.push(here + dt * (-speed * upwind + source + diffusion));
            }
            out
        })
        .collect();

    let mut new_fields = vec![vec![0.0; m]; n];
    for (j, point) in new_points.iter().enumerate() {
        for c in 0..n {
            new_fields[c][j] = point[c];
        }
    }
    new_fields
}

/// Advances the profile on a uniform periodic grid and returns snapshots at
/// the requested times (or just at `t_end` when none are given).
///
/// The step size is `dt` capped by `safety` times the stability limit of
/// [`cfl_limits`], re-evaluated every step; an over-large step is halved up
/// to [`MAX_DT_HALVINGS`] times before the solver reports failure. Snapshot
/// times are landed on exactly by shortening the final step into each.
#[allow(clippy::too_many_arguments)]
pub fn fd_solve(
    sys: &SystemSpec,
    prof: &InitialProfile,
    domain: (f64, f64),
    dx: f64,
    dt: f64,
    t_end: f64,
    safety: f64,
    snapshot_times: &[f64],
) -> Result<Vec<GridState>, ParabolicError> {
    if prof.n() != sys.n {
        return Err(ParabolicError::ComponentMismatch { expected: sys.n, got: prof.n() });
    }
    if !prof.periodic() {
        return Err(ParabolicError::NotPeriodic);
    }
    let (lo, hi) = domain;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ParabolicError::BadParameter { name: "domain", value: hi - lo });
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(ParabolicError::BadParameter { name: "dx", value: dx });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ParabolicError::BadParameter { name: "dt", value: dt });
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(ParabolicError::BadParameter { name: "t_end", value: t_end });
    }
    if !(safety.is_finite() && safety > 0.0 && safety <= 1.0) {
        return Err(ParabolicError::BadParameter { name: "safety", value: safety });
    }

    let span = hi - lo;
    let m = (span / dx).round() as usize;
    if m < 2 || (m as f64 * dx - span).abs() > GRID_FIT_RTOL * span {
        return Err(ParabolicError::DomainNotMultipleOfDx { span, dx });
    }

    let mut times: Vec<f64> = snapshot_times.to_vec();
    if times.is_empty() {
        times.push(t_end);
    }
    for &ts in &times {
        if !(ts.is_finite() && (0.0..=t_end).contains(&ts)) {
            return Err(ParabolicError::BadSnapshotTime { t: ts, t_end });
        }
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(ParabolicError::BadSnapshotTime { t: w[1], t_end });
        }
    }

    // One grid point per cell; x = hi is the periodic image of x = lo.
    let x_grid: Vec<f64> = (0..m).map(|j| lo + span * j as f64 / m as f64).collect();
    let mut fields: Vec<Vec<f64>> = vec![Vec::with_capacity(m); sys.n];
    for &x in &x_grid {
        let v = prof.value(x);
        for (c, comp) in fields.iter_mut().enumerate() {
            comp.push(v[c]);
        }
    }

    let mut history = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut step = 0usize;
    for &target in &times {
        while t < target - GRID_FIT_RTOL * target.max(1.0) {
            let state = GridState { x_grid: x_grid.clone(), fields: fields.clone(), t };
            let allowed = safety * cfl_limits(sys, &state, dx);
            let mut dt_eff = dt.min(target - t);
            let mut halvings = 0;
            while dt_eff > allowed {
                dt_eff *= 0.5;
                halvings += 1;
                if halvings > MAX_DT_HALVINGS {
                    return Err(ParabolicError::CflExhausted { step, t, allowed });
                }
            }
            fields = step_fields(sys, &fields, dx, dt_eff);
            t += dt_eff;
            step += 1;
            if (t - target).abs() <= GRID_FIT_RTOL * target.max(1.0) {
                t = target;
            }
            for (c, comp) in fields.iter().enumerate() {
                if let Some(j) = comp.iter().position(|v| !v.is_finite()) {
                    return Err(ParabolicError::NonFiniteField {
                        step,
                        t,
                        x: x_grid[j],
                        component: c,
                    });
                }
            }
        }
        history.push(GridState { x_grid: x_grid.clone(), fields: fields.clone(), t: target });
    }
    Ok(history)
}
