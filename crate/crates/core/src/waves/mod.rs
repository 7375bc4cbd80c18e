//! Wave-frame analysis for systems sharing one transport speed.
//!
//! A traveling wave V(x, t) = 𝒱(x − wt) turns the PDE into an ODE in the
//! wave coordinate ξ with a movable pole on the hyperplane 𝒱₁ = w, where the
//! characteristic speed matches the frame speed.  This module integrates
//! those wave-frame ODEs (inviscid and viscous), follows simple-wave curves
//! in state space, classifies the zero state of the linearized profile
//! equations, and resolves the closed orbits of the blood-flow phase system.

mod bloodflow;
mod linearized;

pub use bloodflow::{
    bloodflow_classify, bloodflow_period, bloodflow_psi, bloodflow_rhs,
    bloodflow_speed_for_perimeter, bloodflow_turning_points, PhasePoint,
};
pub use linearized::{linearized_tw_roots, TwModel};

use num_complex::Complex64;
use thiserror::Error;

use crate::hyperbolic::SystemSpec;
use crate::numkit::{integrate_ode, integrate_to, NumError, OdeTrajectory, Termination};

/// Relative proximity to a vanishing denominator (the pole 𝒱₁ = w, or the
/// transport-speed factor of a simple-wave curve) at which integration stops
/// rather than step across.
pub const POLE_GUARD_RTOL: f64 = 1e-9;

/// A run that dies by step underflow with the state this close (relative) to
/// the pole is reported as a detected singularity: error control stalls just
/// outside the guard ball, but the approach is unambiguous.
pub const POLE_RECLASSIFY_RTOL: f64 = 1e-6;

/// Absolute error-control floor for the wave-frame integrators; states of
/// interest are O(1), so this never dominates the relative tolerance.
pub const WAVE_ATOL: f64 = 1e-12;

/// Errors from wave-frame and phase-plane analysis.
#[derive(Debug, Error)]
pub enum WaveError {
    #[error("state has {got} components, system has {expected}")]
    ComponentMismatch { expected: usize, got: usize },
    #[error("transport-speed denominator vanishes at the seed (value {den:.3e})")]
    ZeroDenominatorAtSeed { den: f64 },
    #[error("initial state has V1 = {v1} inside the pole guard around wave speed w = {w}")]
    StartsOnPole { v1: f64, w: f64 },
    #[error("viscosity must be positive and finite, got {nu}")]
    ViscosityRequired { nu: f64 },
    #[error("wave speed must be nonzero")]
    ZeroWaveSpeed,
    #[error("coefficient `{name}` is out of range: {value}")]
    BadCoefficient { name: &'static str, value: f64 },
    #[error("denominator {which} vanishes (value {value:.3e})")]
    DenominatorVanishes { which: &'static str, value: f64 },
    #[error("equilibrium is a {found:?}, not a center: w^2 = {w2:.6e} vs mu*S0 = {mu_s0:.6e}")]
    NotACenter { found: EquilibriumKind, w2: f64, mu_s0: f64 },
    #[error("energy {psi0:.6e} lies below the equilibrium level {psi_eq:.6e}; no orbit attains it")]
    EnergyBelowEquilibrium { psi0: f64, psi_eq: f64 },
    #[error("orbit at energy {psi0:.6e} is not closed (lower turning point {lower:?}, upper {upper:?})")]
    OrbitNotClosed { psi0: f64, lower: Option<f64>, upper: Option<f64> },
    #[error("orbit degenerates to the equilibrium point (energy {psi0:.6e})")]
    DegenerateOrbit { psi0: f64 },
    #[error("starting V = {v_plus:.6e} reaches outside the closed-orbit band (limit {band:.6e})")]
    OutsideBand { v_plus: f64, band: f64 },
    #[error("no sign change over [{lo}, {hi}]: f(lo) = {f_lo:.3e}, f(hi) = {f_hi:.3e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("starting point is an equilibrium; the return orbit is undefined")]
    StartIsEquilibrium,
    #[error("orbit did not return to the start section within parameter {t_max}")]
    NoReturn { t_max: f64 },
    #[error(transparent)]
    Numerics(#[from] NumError),
}

/// A system together with the frame speed w of the sought traveling wave
/// V(x, t) = 𝒱(x − w t).
#[derive(Debug, Clone)]
pub struct TravelingWaveProblem {
    pub sys: SystemSpec,
    pub w: f64,
}

impl TravelingWaveProblem {
    pub fn new(sys: SystemSpec, w: f64) -> Result<Self, WaveError> {
        if !w.is_finite() {
            return Err(WaveError::BadCoefficient { name: "w", value: w });
        }
        Ok(Self { sys, w })
    }
}

/// Local type of an equilibrium: the eigenvalues of the linearization (for
/// phase-plane points) or the mode roots (for higher-order profile
/// equations), plus the qualitative label they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumClass {
    pub kind: EquilibriumKind,
    /// Sorted by (real part, imaginary part); closed under conjugation.
    pub eigenvalues: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Center,
    Saddle,
    Focus,
    Node,
    Degenerate,
}

impl EquilibriumClass {
    /// True when every mode is purely oscillatory, i.e. periodic behavior.
    pub fn is_periodic(&self) -> bool {
        self.kind == EquilibriumKind::Center
    }
}

/// Labels a spectrum. Spectra of order > 2 do not fit the planar taxonomy
/// exactly; the rule used here is: all eigenvalues on the (punctured)
/// imaginary axis → center, any rotating mode that grows or decays → focus,
/// all real and nonzero → saddle/node by sign mixture, anything with a zero
/// eigenvalue → degenerate.
pub(crate) fn classify_eigenvalues(eigenvalues: Vec<Complex64>) -> EquilibriumClass {
    let is_zero = |z: &Complex64| z.norm() == 0.0;
    let is_imag = |z: &Complex64| z.re.abs() <= 1e-12 * z.norm() && z.im != 0.0;
    let kind = if eigenvalues.iter().any(is_zero) {
        EquilibriumKind::Degenerate
    } else if eigenvalues.iter().all(is_imag) {
        EquilibriumKind::Center
    } else if eigenvalues.iter().any(|z| z.im != 0.0) {
        EquilibriumKind::Focus
    } else if eigenvalues.iter().any(|z| z.re > 0.0) && eigenvalues.iter().any(|z| z.re < 0.0) {
        EquilibriumKind::Saddle
    } else {
        EquilibriumKind::Node
    };
    EquilibriumClass { kind, eigenvalues }
}

/// Downgrades a step-underflow ending to a detected singularity when the
/// final state sits within [`POLE_RECLASSIFY_RTOL`] of the pole: the solver
/// stalled because the solution runs into the pole, not for numerical lack
/// of luck elsewhere.
fn reclassify_pole_stall(mut traj: OdeTrajectory, w: f64) -> OdeTrajectory {
    if traj.termination == Termination::StepUnderflow {
        let dist = (traj.last_state()[0] - w).abs();
        if dist <= POLE_RECLASSIFY_RTOL * w.abs().max(1.0) {
            traj.termination = Termination::SingularityDetected;
        }
    }
    traj
}

/// Integrates the simple-wave relation dVᵢ/dV₁ = (QV)ᵢ / (QV)₁ through
/// `seed`, sweeping V₁ across `v1_span` in both directions from the seed.
///
/// States carry the full vector, so `params[k] == states[k][0] == V₁`.  The
/// relation for the first component is identically 1, which keeps the
/// parametrization consistent.  A vanishing denominator (QV)₁ along the way
/// ends the affected sweep with `SingularityDetected`; at the seed itself it
/// is rejected.  `termination` is `ReachedEnd` only when both sweeps covered
/// their half-spans.
pub fn simple_wave_curve(
    sys: &SystemSpec,
    seed: &[f64],
    v1_span: (f64, f64),
    rtol: f64,
) -> Result<OdeTrajectory, WaveError> {
    let n = sys.n;
    if seed.len() != n {
        return Err(WaveError::ComponentMismatch { expected: n, got: seed.len() });
    }
    let (lo, hi) = v1_span;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(NumError::InvalidArgument {
            arg: "v1_span",
            reason: format!("need finite lo < hi, got ({lo}, {hi})"),
        }
        .into());
    }
    if !(lo <= seed[0] && seed[0] <= hi) {
        return Err(NumError::InvalidArgument {
            arg: "seed",
            reason: format!("V1 = {} outside the sweep range [{lo}, {hi}]", seed[0]),
        }
        .into());
    }

    let den_of = |y: &[f64]| sys.q.row(0).iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let near_zero = |den: f64, y: &[f64]| {
        let scale = y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        den.abs() <= POLE_GUARD_RTOL * scale
    };
    let seed_den = den_of(seed);
    if near_zero(seed_den, seed) {
        return Err(WaveError::ZeroDenominatorAtSeed { den: seed_den });
    }

    let guard = |y: &[f64]| near_zero(den_of(y), y);

    // Forward sweep in V1; dy₀/dV₁ evaluates to exactly 1.
    let forward = |_v1: f64, y: &[f64], dy: &mut [f64]| {
        let qv = sys.q.matvec(y);
        for i in 0..n {
            dy[i] = qv[i] / qv[0];
        }
    };
    // Backward sweep, integrated forward in s = −V₁.
    let backward = |_s: f64, y: &[f64], dy: &mut [f64]| {
        let qv = sys.q.matvec(y);
        for i in 0..n {
            dy[i] = -qv[i] / qv[0];
        }
    };

    let up = if hi > seed[0] {
        Some(integrate_ode(forward, (seed[0], hi), seed, rtol, WAVE_ATOL, Some(&guard))?)
    } else {
        None
    };
    let down = if lo < seed[0] {
        Some(integrate_ode(backward, (-seed[0], -lo), seed, rtol, WAVE_ATOL, Some(&guard))?)
    } else {
        None
    };

    let mut params = Vec::new();
    let mut states = Vec::new();
    let mut termination = Termination::ReachedEnd;
    let mut merge_termination = |t: Termination| {
        if t == Termination::SingularityDetected
            || (t == Termination::StepUnderflow && termination == Termination::ReachedEnd)
        {
            termination = t;
        }
    };
    if let Some(traj) = down {
        merge_termination(traj.termination);
        // Reverse onto increasing V₁ and drop the duplicated seed entry.
        for (s, y) in traj.params.iter().zip(&traj.states).rev() {
            if *s == -seed[0] {
                continue;
            }
            params.push(-s);
            states.push(y.clone());
        }
    }
    match up {
        Some(traj) => {
            merge_termination(traj.termination);
            params.extend_from_slice(&traj.params);
            states.extend(traj.states);
        }
        None => {
            params.push(seed[0]);
            states.push(seed.to_vec());
        }
    }
    Ok(OdeTrajectory { params, states, termination })
}

/// Integrates the inviscid wave-frame reduction dV/dξ = QV / (V₁ − w) over
/// `xi_span`.  The run stops with `SingularityDetected` when V₁ enters the
/// guard ball around the pole V₁ = w; starting inside it is an error.
pub fn tw_inviscid(
    problem: &TravelingWaveProblem,
    start: &[f64],
    xi_span: (f64, f64),
    rtol: f64,
) -> Result<OdeTrajectory, WaveError> {
    let n = problem.sys.n;
    if start.len() != n {
        return Err(WaveError::ComponentMismatch { expected: n, got: start.len() });
    }
    let w = problem.w;
    let guard_width = POLE_GUARD_RTOL * w.abs().max(1.0);
    if (start[0] - w).abs() <= guard_width {
        return Err(WaveError::StartsOnPole { v1: start[0], w });
    }
    let rhs = |_xi: f64, y: &[f64], dy: &mut [f64]| {
        let qv = problem.sys.q.matvec(y);
        let den = y[0] - w;
        for i in 0..n {
            dy[i] = qv[i] / den;
        }
    };
    let guard = |y: &[f64]| (y[0] - w).abs() <= guard_width;
    let traj = integrate_ode(rhs, xi_span, start, rtol, WAVE_ATOL, Some(&guard))?;
    Ok(reclassify_pole_stall(traj, w))
}

/// Integrates the viscous wave-frame profile equation
/// ν𝒱‴ = (𝒱 − w)𝒱″ + (𝒱′)² + 𝒱/(𝒱 − w)
/// as a first-order system in (𝒱, 𝒱′, 𝒱″), with the data given at
/// `xi_span.0`.  Runs that steer into the pole 𝒱 = w end with
/// `SingularityDetected` (directly via the guard, or by reclassified step
/// underflow just outside it).
pub fn tw_viscous_coldplasma(
    nu: f64,
    w: f64,
    start: (f64, f64, f64),
    xi_span: (f64, f64),
    rtol: f64,
) -> Result<OdeTrajectory, WaveError> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(WaveError::ViscosityRequired { nu });
    }
    if !w.is_finite() {
        return Err(WaveError::BadCoefficient { name: "w", value: w });
    }
    let guard_width = POLE_GUARD_RTOL * w.abs().max(1.0);
    if (start.0 - w).abs() <= guard_width {
        return Err(WaveError::StartsOnPole { v1: start.0, w });
    }
    let rhs = |_xi: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = ((y[0] - w) * y[2] + y[1] * y[1] + y[0] / (y[0] - w)) / nu;
    };
    let guard = |y: &[f64]| (y[0] - w).abs() <= guard_width;
    let y0 = [start.0, start.1, start.2];
    let traj = integrate_ode(rhs, xi_span, &y0, rtol, WAVE_ATOL, Some(&guard))?;
    Ok(reclassify_pole_stall(traj, w))
}

/// Outcome of following an orbit until it first re-crosses the section
/// through its starting point.
#[derive(Debug, Clone, Copy)]
pub struct OrbitReturn {
    /// Parameter (arc) length of the first return — the period, if closed.
    pub period: f64,
    /// Euclidean distance between the returned state and the start.
    pub closure_gap: f64,
}

/// Follows `rhs` from `start` until the trajectory first crosses, in the
/// forward sense, the hyperplane through `start` normal to the initial flow
/// direction.  For a closed orbit this yields the period and how exactly the
/// orbit closes.  Intended for planar orbits that cross the section twice
/// per loop; it reports `NoReturn` if the crossing never happens within
/// `t_max`.
pub fn first_return_period<F>(
    mut rhs: F,
    start: &[f64],
    t_max: f64,
    rtol: f64,
) -> Result<OrbitReturn, WaveError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = start.len();
    let mut direction = vec![0.0; n];
    rhs(0.0, start, &mut direction);
    let speed_sq: f64 = direction.iter().map(|d| d * d).sum();
    let scale = start.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    // Written so that a NaN speed also counts as "not moving".
    let moving = speed_sq.sqrt() > 1e-14 * scale;
    if !moving {
        return Err(WaveError::StartIsEquilibrium);
    }
    let section = |y: &[f64]| -> f64 {
        direction.iter().zip(y).zip(start).map(|((d, yi), si)| d * (yi - si)).sum()
    };

    let traj = integrate_ode(&mut rhs, (0.0, t_max), start, rtol, WAVE_ATOL, None)?;

    // The section value starts at 0 and initially rises (ds/dt = |d|² > 0).
    // Arm the detector once the orbit is on the far side (s < 0); the next
    // crossing back to s ≥ 0 is the first return.
    let mut armed = false;
    let mut bracket = None;
    for k in 1..traj.params.len() {
        let s = section(&traj.states[k]);
        if !armed {
            if s < 0.0 {
                armed = true;
            }
            continue;
        }
        if s >= 0.0 {
            bracket = Some(k);
            break;
        }
    }
    let Some(k) = bracket else {
        return Err(WaveError::NoReturn { t_max });
    };

    // Refine inside [t_{k-1}, t_k] by bisection on the crossing time,
    // re-integrating the short sub-span from the stored state each probe.
    let t_lo = traj.params[k - 1];
    let y_lo = traj.states[k - 1].clone();
    let mut lo = 0.0;
    let mut hi = traj.params[k] - t_lo;
    let mut y_hit = traj.states[k].clone();
    for _ in 0..60 {
        if hi - lo <= 1e-12 * t_max.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let y_mid = integrate_to(&mut rhs, (t_lo, t_lo + mid), &y_lo, rtol, WAVE_ATOL)?;
        if section(&y_mid) >= 0.0 {
            hi = mid;
            y_hit = y_mid;
        } else {
            lo = mid;
        }
    }
    let period = t_lo + hi;
    let closure_gap =
        y_hit.iter().zip(start).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(OrbitReturn { period, closure_gap })
}
