//! First-root scanning with bisection refinement.
//!
//! The scan uses a fixed user-supplied step: the target functions are
//! quasi-polynomials whose roots have no usable a-priori bounds, so a scan
//! with refinement is the robust, predictable choice. Callers pick the step;
//! the conventional default is `t_max / 1e4`.

use super::NumError;

/// How a root was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Sign change bracketed and refined by bisection to width `tol`.
    SignChange,
    /// `|f| < tol` at a scan point with no sign change; reported at the scan
    /// point itself (a graze cannot be bracketed).
    Touch,
}

/// A located root of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub t: f64,
    pub kind: RootKind,
}

/// Finds the first root of `f` on `(0, t_max]`.
///
/// Scans t = 0, scan_step, 2·scan_step, …; the first sign change is refined
/// by bisection to width `tol`, and a scan point with `|f| < tol` counts as a
/// touching zero. A root at t = 0 is ignored whenever `f(0) > tol`.
pub fn find_first_root<F>(
    f: F,
    t_max: f64,
    scan_step: f64,
    tol: f64,
) -> Result<Option<Root>, NumError>
where
    F: Fn(f64) -> f64,
{
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(NumError::InvalidArgument {
            arg: "t_max",
            reason: format!("must be positive and finite, got {t_max}"),
        });
    }
    if !(scan_step.is_finite() && scan_step > 0.0 && scan_step <= t_max) {
        return Err(NumError::InvalidArgument {
            arg: "scan_step",
            reason: format!("must satisfy 0 < scan_step <= t_max, got {scan_step}"),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NumError::InvalidArgument {
            arg: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }

    let eval = |t: f64| -> Result<f64, NumError> {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumError::NonFiniteEval { t })
        }
    };

    let mut t_prev = 0.0;
    let mut f_prev = eval(0.0)?;
    if f_prev.abs() <= tol && f_prev <= tol {
        // Only f(0) > tol exempts t=0 from counting as a root.
        return Ok(Some(Root { t: 0.0, kind: RootKind::Touch }));
    }

    let steps = (t_max / scan_step).ceil() as usize;
    for k in 1..=steps {
        let t = (k as f64 * scan_step).min(t_max);
        let v = eval(t)?;
        if v.abs() <= tol {
            return Ok(Some(Root { t, kind: RootKind::Touch }));
        }
        if f_prev * v < 0.0 {
            let root = bisect_root(&f, t_prev, t, f_prev, tol)?;
            return Ok(Some(Root { t: root, kind: RootKind::SignChange }));
        }
        t_prev = t;
        f_prev = v;
    }
    Ok(None)
}

/// Bisects a bracketed sign change down to width `tol`; `f_lo = f(lo)`.
pub fn bisect_root<F>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> Result<f64, NumError>
where
    F: Fn(f64) -> f64,
{
    let mut sign_lo = f_lo.signum();
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let v = f(mid);
        if !v.is_finite() {
            return Err(NumError::NonFiniteEval { t: mid });
        }
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
            let _ = &mut sign_lo;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cosine_first_root_is_half_pi() {
        let r = find_first_root(f64::cos, 10.0, 0.05, 1e-10).unwrap().unwrap();
        assert_eq!(r.kind, RootKind::SignChange);
        assert_abs_diff_eq!(r.t, std::f64::consts::FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn positive_function_has_no_root() {
        assert!(find_first_root(|t| t * t + 1.0, 10.0, 0.05, 1e-10).unwrap().is_none());
    }

    #[test]
    fn root_at_zero_ignored_when_f0_positive() {
        // f(0) = 1 > tol, first root strictly positive.
        let r = find_first_root(|t| (t - 1.0) * (t + 1.0), 5.0, 0.01, 1e-9).unwrap().unwrap();
        assert_abs_diff_eq!(r.t, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn grazing_zero_reported_as_touch() {
        // f(t) = (t-2)² + ε stays positive but dips below tol at a scan point.
        let f = |t: f64| (t - 2.0) * (t - 2.0) + 1e-14;
        let r = find_first_root(f, 5.0, 0.001, 1e-6).unwrap().unwrap();
        assert_eq!(r.kind, RootKind::Touch);
        assert_abs_diff_eq!(r.t, 2.0, epsilon = 1e-3);
    }

    #[test]
    fn non_finite_evaluation_is_reported_with_location() {
        let f = |t: f64| if t > 0.5 { f64::NAN } else { 1.0 };
        match find_first_root(f, 1.0, 0.2, 1e-9) {
            Err(NumError::NonFiniteEval { t }) => assert!(t > 0.5),
            other => panic!("expected NonFiniteEval, got {other:?}"),
        }
    }

    #[test]
    fn returned_root_has_small_residual() {
        // |f(root)| ≤ 10·tol·max(1, local slope) for a sign-change root.
        let f = |t: f64| (0.7 * t).sin() - 0.3;
        let tol = 1e-9;
        let r = find_first_root(f, 20.0, 0.01, tol).unwrap().unwrap();
        let h = 1e-6;
        let slope = ((f(r.t + h) - f(r.t - h)) / (2.0 * h)).abs();
        assert!(f(r.t).abs() <= 10.0 * tol * slope.max(1.0));
    }
}
