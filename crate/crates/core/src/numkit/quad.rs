//! Adaptive quadrature for integrands with inverse-square-root endpoint
//! singularities.
//!
//! The integral is split at the midpoint and each half is regularized by the
//! substitution u = √(x−a) (resp. u = √(b−x)), which turns a 1/√ endpoint
//! singularity into a bounded integrand. Both transformed halves then share a
//! single globally adaptive Gauss–Kronrod 15-point refinement loop.

use super::NumError;

/// 15-point Kronrod nodes on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// 7-point Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Maximum number of refined segments before giving up.
const MAX_SEGMENTS: usize = 4096;

/// One Gauss–Kronrod 15 evaluation on [lo, hi]: returns (estimate, error).
fn gk15<G>(g: &G, lo: f64, hi: f64) -> Result<(f64, f64), NumError>
where
    G: Fn(f64) -> f64,
{
    let half = 0.5 * (hi - lo);
    let center = 0.5 * (lo + hi);

    let eval = |x: f64| -> Result<f64, NumError> {
        let v = g(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumError::NonFiniteEval { t: x })
        }
    };

    let f_center = eval(center)?;
    let mut resg = WG[3] * f_center;
    let mut resk = WGK[7] * f_center;
    let mut resabs = resk.abs();

    let mut fv = [0.0_f64; 15]; // fv[i] pairs with XGK node i (7 pairs + center)
    fv[7] = f_center;
    for i in 0..7 {
        let dx = half * XGK[i];
        let f_lo = eval(center - dx)?;
        let f_hi = eval(center + dx)?;
        fv[i] = f_lo;
        fv[14 - i] = f_hi;
        let sum = f_lo + f_hi;
        resk += WGK[i] * sum;
        resabs += WGK[i] * (f_lo.abs() + f_hi.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * sum;
        }
    }

    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (f_center - reskh).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv[i] - reskh).abs() + (fv[14 - i] - reskh).abs());
    }

    let estimate = resk * half;
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let _ = resabs;
    Ok((estimate, err))
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

struct Segment {
    side: Side,
    lo: f64,
    hi: f64,
    estimate: f64,
    error: f64,
}

/// Integrates `f` over [a, b] where `f` may blow up like 1/√(x−a) and/or
/// 1/√(b−x) at the endpoints. Relative error target `tol`.
pub fn quad_sqrt_singular<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, NumError>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(NumError::InvalidArgument {
            arg: "a, b",
            reason: format!("need finite a < b, got a={a}, b={b}"),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NumError::InvalidArgument {
            arg: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }

    let mid = 0.5 * (a + b);
    // Left half [a, mid] with x = a + u²; right half [mid, b] with x = b − u².
    // Both transforms map the singular endpoint to u = 0, where the factor 2u
    // cancels the 1/√ growth; GK nodes never touch u = 0 exactly.
    let g_left = |u: f64| 2.0 * u * f(a + u * u);
    let g_right = |u: f64| 2.0 * u * f(b - u * u);

    let eval_side = |side: Side, lo: f64, hi: f64| -> Result<(f64, f64), NumError> {
        match side {
            Side::Left => gk15(&g_left, lo, hi),
            Side::Right => gk15(&g_right, lo, hi),
        }
    };

    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    for (side, u_max) in [(Side::Left, (mid - a).sqrt()), (Side::Right, (b - mid).sqrt())] {
        let (estimate, error) = eval_side(side, 0.0, u_max)?;
        segments.push(Segment { side, lo: 0.0, hi: u_max, estimate, error });
    }

    loop {
        let total: f64 = segments.iter().map(|s| s.estimate).sum();
        let err_total: f64 = segments.iter().map(|s| s.error).sum();
        let bound = if total == 0.0 { tol } else { tol * total.abs() };
        if err_total <= bound {
            return Ok(total);
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(NumError::QuadratureNonConvergence {
                estimate: total,
                error: err_total,
                tol,
            });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("segment list is never empty");
        let Segment { side, lo, hi, .. } = segments[worst];
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            // Interval at floating-point resolution; accept current estimate.
            let total: f64 = segments.iter().map(|s| s.estimate).sum();
            return Ok(total);
        }
        let (e1, r1) = eval_side(side, lo, m)?;
        let (e2, r2) = eval_side(side, m, hi)?;
        segments[worst] = Segment { side, lo, hi: m, estimate: e1, error: r1 };
        segments.push(Segment { side, lo: m, hi, estimate: e2, error: r2 });
    }
}
