//! Embedded adaptive Runge–Kutta pair (Dormand–Prince 5(4)) with a guard
//! predicate and explicit termination bookkeeping.
//!
//! The integrator never panics on stiff blow-up: steps shrink under error
//! control and the run ends in `StepUnderflow` once the step falls below
//! 1e-12 of the span, or in `SingularityDetected` if the guard fires first.

use super::NumError;

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    SingularityDetected,
    StepUnderflow,
}

/// Accepted states of one integration; `params` is strictly increasing and
/// every stored value is finite.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub params: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
}

impl OdeTrajectory {
    pub fn last_param(&self) -> f64 {
        *self.params.last().expect("trajectory holds at least the initial state")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// 5th-order weights (also the A7j row, FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between 5th- and 4th-order weights, for the error estimate.
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

/// Minimum step as a fraction of the span; falling below it terminates the
/// run with `StepUnderflow`.
pub const MIN_STEP_FRACTION: f64 = 1e-12;

const MAX_STEPS: usize = 50_000_000;

/// Predicate over the state vector; returning `true` on an accepted state
/// stops the integration with `SingularityDetected`.
pub type StateGuard<'a> = &'a dyn Fn(&[f64]) -> bool;

/// Integrates `y' = f(t, y)` over `span` with componentwise error control
/// `|err_i| ≤ atol + rtol·|y_i|`.
///
/// `guard`, when given, is evaluated on every accepted state; the first state
/// satisfying it is kept and the run stops with `SingularityDetected`.
pub fn integrate_ode<F>(
    mut f: F,
    span: (f64, f64),
    y0: &[f64],
    rtol: f64,
    atol: f64,
    guard: Option<StateGuard<'_>>,
) -> Result<OdeTrajectory, NumError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let (t0, t1) = span;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(NumError::InvalidArgument {
            arg: "span",
            reason: format!("need finite t0 < t1, got ({t0}, {t1})"),
        });
    }
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(NumError::InvalidArgument {
            arg: "rtol/atol",
            reason: format!("must be positive, got ({rtol}, {atol})"),
        });
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(NumError::NonFinite { context: "initial state".to_string() });
    }
    let n = y0.len();
    let span_len = t1 - t0;
    let h_min = MIN_STEP_FRACTION * span_len;

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    f(t, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(NumError::NonFiniteEval { t });
    }

    let mut params = vec![t];
    let mut states = vec![y.clone()];
    if let Some(g) = guard {
        if g(&y) {
            return Ok(OdeTrajectory { params, states, termination: Termination::SingularityDetected });
        }
    }

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    let mut h = (span_len * 1e-3).min(span_len);
    let mut just_rejected = false;
    let mut termination = Termination::ReachedEnd;

    for step in 0.. {
        if step >= MAX_STEPS {
            return Err(NumError::TooManySteps { max_steps: MAX_STEPS });
        }
        if t >= t1 {
            break;
        }
        h = h.min(t1 - t);
        if h < h_min {
            termination = Termination::StepUnderflow;
            break;
        }

        // k1 is always fresh at (t, y): seeded before the loop, swapped in by
        // FSAL on acceptance, untouched on rejection.
        let mut stage_bad = !k1.iter().all(|v| v.is_finite());
        if !stage_bad {
            for i in 0..n {
                ytmp[i] = y[i] + h * A21 * k1[i];
            }
            f(t + C2 * h, &ytmp, &mut k2);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * h, &ytmp, &mut k3);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * h, &ytmp, &mut k4);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * h, &ytmp, &mut k5);
            for i in 0..n {
                ytmp[i] =
                    y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(t + h, &ytmp, &mut k6);
            for i in 0..n {
                ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            f(t + h, &ynew, &mut k7);
            stage_bad = ynew.iter().any(|v| !v.is_finite())
                || [&k2, &k3, &k4, &k5, &k6, &k7]
                    .iter()
                    .any(|k| k.iter().any(|v| !v.is_finite()));
        }

        if stage_bad {
            h *= 0.5;
            just_rejected = true;
            continue;
        }

        let mut err_sq = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = atol + rtol * y[i].abs().max(ynew[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7); // FSAL
            params.push(t);
            states.push(y.clone());
            if let Some(g) = guard {
                if g(&y) {
                    termination = Termination::SingularityDetected;
                    break;
                }
            }
            let grow_cap = if just_rejected { 1.0 } else { 5.0 };
            let fac = if err == 0.0 { grow_cap } else { 0.9 * err.powf(-0.2) };
            h *= fac.clamp(0.2, grow_cap);
            just_rejected = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= if fac.is_finite() { fac } else { 0.2 };
            just_rejected = true;
        }
    }

    Ok(OdeTrajectory { params, states, termination })
}

/// Convenience: integrate and return only the final state.
pub(crate) fn integrate_to<F>(
    f: F,
    span: (f64, f64),
    y0: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Vec<f64>, NumError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let traj = integrate_ode(f, span, y0, rtol, atol, None)?;
    Ok(traj.states.last().expect("non-empty trajectory").clone())
}
