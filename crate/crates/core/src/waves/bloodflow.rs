//! Closed orbits of the blood-flow wave-frame phase system
//!
//! ```text
//! d𝓔/dξ = −S₀𝒱 / (𝒱 − w),
//! d𝒱/dξ = 𝓔 (𝒱 − w)² / ((𝒱 − w)³ + μwS₀),
//! ```
//!
//! its conserved energy Ψ, the turning points of an orbit, and the orbit
//! perimeter — the spatial period of the associated periodic traveling wave.
//!
//! Everything hinges on the potential g(𝒱) = S₀𝒱² − wμS₀²(2𝒱 − w)/(𝒱 − w)²
//! with Ψ = 𝓔² + g(𝒱): orbits are level sets of Ψ, closed ones live below
//! the potential hump at 𝒱 = band = w − (μwS₀)^{1/3}, which is exactly where
//! the d𝒱/dξ denominator changes sign.

use super::{classify_eigenvalues, EquilibriumClass, EquilibriumKind, WaveError};
use crate::numkit::{bisect_root, quad_sqrt_singular};
use num_complex::Complex64;

/// A point of the (𝓔, 𝒱) phase plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub e: f64,
    pub v: f64,
}

/// Relative width at which a denominator counts as vanished.
pub const DENOMINATOR_GUARD_RTOL: f64 = 1e-12;

/// Energies within this relative distance of the equilibrium level collapse
/// the orbit to the equilibrium point.
pub const DEGENERATE_ENERGY_RTOL: f64 = 1e-10;

/// Relative tolerance of the perimeter quadrature.  The achievable accuracy
/// is bounded by how well double precision can place the turning points —
/// roundoff in the energy shifts them by a few ulps, which perturbs the
/// endpoint square-root singularity — so demanding much more than this
/// stalls; the dual-route agreement checks compare at 1e-4, leaving four
/// orders of margin.
pub const PERIOD_QUAD_TOL: f64 = 1e-8;

/// Each outward scan step covers 1/256 of the distance left to the pole at
/// |𝒱| = w, refining automatically on approach; 7000 steps shrink that
/// distance by (255/256)^7000 ≈ 1.3e-12, after which no crossing means no
/// turning point on that side.
const TURNING_SCAN_FRACTION: f64 = 1.0 / 256.0;
const TURNING_SCAN_MAX_STEPS: usize = 7000;

fn check_positive(name: &'static str, value: f64) -> Result<(), WaveError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(WaveError::BadCoefficient { name, value })
    }
}

fn check_parameters(mu: f64, s0: f64, w: f64) -> Result<(), WaveError> {
    check_positive("mu", mu)?;
    check_positive("s0", s0)?;
    check_positive("w", w)
}

/// g(𝒱) − g(0), in the exactly factored form S₀𝒱²(1 − μS₀/(𝒱 − w)²).
///
/// Subtracting g(0) = μS₀² symbolically matters: orbits near the equilibrium
/// have excess energies many orders below Ψ itself, and every turning-point
/// and |𝓔| computation lives entirely in that excess.  Forming it as a
/// difference of O(1) potentials would cap the resolvable orbit size at
/// roughly the square root of machine epsilon.
fn g_excess(mu: f64, s0: f64, w: f64, v: f64) -> f64 {
    let d = v - w;
    s0 * v * v * (1.0 - mu * s0 / (d * d))
}

/// g'(𝒱) = 2S₀𝒱 (1 + wμS₀/(𝒱 − w)³).
fn g_potential_slope(mu: f64, s0: f64, w: f64, v: f64) -> f64 {
    let d = v - w;
    2.0 * s0 * v * (1.0 + w * mu * s0 / (d * d * d))
}

/// Upper edge of the closed-orbit band: the 𝒱 where the d𝒱/dξ denominator
/// vanishes and g peaks.
fn band_edge(mu: f64, s0: f64, w: f64) -> f64 {
    w - (mu * s0 * w).cbrt()
}

/// Right-hand side of the phase system at `p`.  Both denominators must stay
/// clear of zero: the transport pole 𝒱 = w and the band edge where
/// (𝒱 − w)³ + μwS₀ = 0.
pub fn bloodflow_rhs(mu: f64, s0: f64, w: f64, p: PhasePoint) -> Result<(f64, f64), WaveError> {
    check_parameters(mu, s0, w)?;
    let d = p.v - w;
    if d.abs() <= DENOMINATOR_GUARD_RTOL * w.abs().max(1.0) {
        return Err(WaveError::DenominatorVanishes { which: "V - w", value: d });
    }
    let cubic = d * d * d + mu * w * s0;
    if cubic.abs() <= DENOMINATOR_GUARD_RTOL * (mu * w * s0).max(1.0) {
        return Err(WaveError::DenominatorVanishes { which: "(V - w)^3 + mu*w*S0", value: cubic });
    }
    Ok((-s0 * p.v / d, p.e * d * d / cubic))
}

/// Conserved energy Ψ(𝓔, 𝒱) = 𝓔² + S₀𝒱² − wμS₀²(2𝒱 − w)/(𝒱 − w)².
pub fn bloodflow_psi(mu: f64, s0: f64, w: f64, p: PhasePoint) -> Result<f64, WaveError> {
    check_parameters(mu, s0, w)?;
    let d = p.v - w;
    if d.abs() <= DENOMINATOR_GUARD_RTOL * w.abs().max(1.0) {
        return Err(WaveError::DenominatorVanishes { which: "V - w", value: d });
    }
    Ok(mu * s0 * s0 + psi_excess(mu, s0, w, p))
}

/// Ψ − μS₀², the energy above the equilibrium level (see [`g_excess`]).
fn psi_excess(mu: f64, s0: f64, w: f64, p: PhasePoint) -> f64 {
    p.e * p.e + g_excess(mu, s0, w, p.v)
}

/// Classifies the equilibrium at the origin from the linearization
/// eigenvalues: a center (±iω, ω = √(S₀/(w² − μS₀))) for w² > μS₀, a saddle
/// for w² < μS₀, degenerate on the boundary.
pub fn bloodflow_classify(mu: f64, s0: f64, w: f64) -> Result<EquilibriumClass, WaveError> {
    check_parameters(mu, s0, w)?;
    let disc = w * w - mu * s0;
    let scale = (w * w).max(mu * s0);
    let eigenvalues = if disc.abs() <= 1e-12 * scale {
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
    } else if disc > 0.0 {
        let omega = (s0 / disc).sqrt();
        vec![Complex64::new(0.0, -omega), Complex64::new(0.0, omega)]
    } else {
        let rate = (s0 / -disc).sqrt();
        vec![Complex64::new(-rate, 0.0), Complex64::new(rate, 0.0)]
    };
    Ok(classify_eigenvalues(eigenvalues))
}

/// Walks outward from 𝒱 = 0 looking for the first crossing of
/// g(𝒱) − g(0) = `excess` in the direction `dir` (±1), then sharpens it by
/// bisection down to floating-point resolution (orbits can be tiny, so no
/// fixed width is adequate; the 200-iteration cap inside the bisection still
/// bounds the work).  Returns `None` when the scan reaches the pole |𝒱| = w
/// without a crossing.
fn turning_point_on_side(mu: f64, s0: f64, w: f64, excess: f64, dir: f64) -> Option<f64> {
    let h = |v: f64| g_excess(mu, s0, w, v) - excess;
    let mut v: f64 = 0.0;
    let mut hv = -excess; // h(0); negative, as the caller checked excess > 0
    for _ in 0..TURNING_SCAN_MAX_STEPS {
        let step = (w - v.abs()) * TURNING_SCAN_FRACTION;
        let v_next = v + dir * step;
        let h_next = h(v_next);
        if !h_next.is_finite() {
            return None;
        }
        if h_next == 0.0 {
            return Some(v_next);
        }
        if h_next.signum() != hv.signum() {
            let (lo, hi) = if dir > 0.0 { (v, v_next) } else { (v_next, v) };
            let f_lo = if dir > 0.0 { hv } else { h_next };
            return bisect_root(&h, lo, hi, f_lo, f64::MIN_POSITIVE).ok();
        }
        v = v_next;
        hv = h_next;
    }
    None
}

/// Turning points (V₋, V₊) of the orbit at energy `psi0`: the nearest
/// crossings of g(𝒱) = Ψ₀ on each side of the equilibrium.  Energies at the
/// equilibrium level μS₀² collapse to (0, 0); energies below it are
/// unreachable; a missing crossing on either side means the orbit is open,
/// and the error reports whichever side was found.
pub fn bloodflow_turning_points(
    mu: f64,
    s0: f64,
    w: f64,
    psi0: f64,
) -> Result<(f64, f64), WaveError> {
    check_parameters(mu, s0, w)?;
    if !psi0.is_finite() {
        return Err(WaveError::BadCoefficient { name: "psi0", value: psi0 });
    }
    let psi_eq = mu * s0 * s0;
    turning_points_from_excess(mu, s0, w, psi0 - psi_eq)
}

/// Turning points from the energy excess Ψ₀ − μS₀².  Callers holding a phase
/// point should compute the excess via [`psi_excess`] rather than
/// subtracting O(1) energies, which caps accuracy near the equilibrium.
fn turning_points_from_excess(
    mu: f64,
    s0: f64,
    w: f64,
    excess: f64,
) -> Result<(f64, f64), WaveError> {
    let psi_eq = mu * s0 * s0;
    let margin = DEGENERATE_ENERGY_RTOL * psi_eq.max(1.0);
    if excess < -margin {
        return Err(WaveError::EnergyBelowEquilibrium { psi0: psi_eq + excess, psi_eq });
    }
    if excess <= margin {
        return Ok((0.0, 0.0));
    }
    let lower = turning_point_on_side(mu, s0, w, excess, -1.0);
    let upper = turning_point_on_side(mu, s0, w, excess, 1.0);
    match (lower, upper) {
        (Some(v_lo), Some(v_hi)) => Ok((v_lo, v_hi)),
        _ => Err(WaveError::OrbitNotClosed { psi0: psi_eq + excess, lower, upper }),
    }
}

/// Perimeter of the closed orbit through `p0` — the spatial period of the
/// periodic traveling wave.  Both half-orbits contribute equally, so
///
/// ```text
/// L = 2 ∫ |(𝒱 − w)³ + μwS₀| / ((𝒱 − w)² √(Ψ₀ − g(𝒱))) d𝒱
/// ```
///
/// between the turning points, where √(Ψ₀ − g) is the |𝓔| on the orbit; the
/// integrand has inverse-square-root endpoints, handled by the dedicated
/// quadrature.
pub fn bloodflow_period(mu: f64, s0: f64, w: f64, p0: PhasePoint) -> Result<f64, WaveError> {
    let class = bloodflow_classify(mu, s0, w)?;
    if class.kind != EquilibriumKind::Center {
        return Err(WaveError::NotACenter { found: class.kind, w2: w * w, mu_s0: mu * s0 });
    }
    // Reject the transport pole before touching the energy.
    let d0 = p0.v - w;
    if d0.abs() <= DENOMINATOR_GUARD_RTOL * w.abs().max(1.0) {
        return Err(WaveError::DenominatorVanishes { which: "V - w", value: d0 });
    }
    let band = band_edge(mu, s0, w);
    if p0.v >= band {
        return Err(WaveError::OutsideBand { v_plus: p0.v, band });
    }
    let excess = psi_excess(mu, s0, w, p0);
    let psi0 = mu * s0 * s0 + excess;
    let (v_lo, v_hi) = turning_points_from_excess(mu, s0, w, excess)?;
    if v_lo == 0.0 && v_hi == 0.0 {
        return Err(WaveError::DegenerateOrbit { psi0 });
    }

    // |g'| at the turning points, for a cancellation-proof |𝓔| near them:
    // the excess difference rounds to ≤ 0 only within ulps of an endpoint,
    // where excess − g_excess(𝒱) ≈ |g'|·distance is accurate.  The distance
    // floor covers quadrature nodes that round onto the endpoint itself.
    let slope_lo = g_potential_slope(mu, s0, w, v_lo).abs();
    let slope_hi = g_potential_slope(mu, s0, w, v_hi).abs();
    let e_on_orbit = |v: f64| -> f64 {
        let e_sq = excess - g_excess(mu, s0, w, v);
        if e_sq > 0.0 {
            e_sq.sqrt()
        } else {
            let (slope, end) = if (v - v_lo).abs() <= (v_hi - v).abs() {
                (slope_lo, v_lo)
            } else {
                (slope_hi, v_hi)
            };
            let dist = (v - end).abs().max(f64::EPSILON * end.abs());
            (slope * dist).sqrt().max(f64::MIN_POSITIVE)
        }
    };
    let integrand = |v: f64| {
        let d = v - w;
        let cubic = d * d * d + mu * w * s0;
        cubic.abs() / (d * d * e_on_orbit(v))
    };
    let half_orbit = quad_sqrt_singular(integrand, v_lo, v_hi, PERIOD_QUAD_TOL)?;
    Ok(2.0 * half_orbit)
}

/// Finds the wave speed whose closed orbit at amplitude `fraction`·band has
/// perimeter `l_target`, by bisection over `bracket`.  The probe orbit at
/// speed w starts from (𝓔, 𝒱) = (0, fraction·band(w)).
pub fn bloodflow_speed_for_perimeter(
    mu: f64,
    s0: f64,
    l_target: f64,
    fraction: f64,
    bracket: (f64, f64),
) -> Result<f64, WaveError> {
    check_positive("mu", mu)?;
    check_positive("s0", s0)?;
    check_positive("l_target", l_target)?;
    if !(fraction.is_finite() && 0.0 < fraction && fraction < 1.0) {
        return Err(WaveError::BadCoefficient { name: "fraction", value: fraction });
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
        return Err(WaveError::BadCoefficient { name: "bracket", value: hi - lo });
    }

    let mismatch = |w: f64| -> Result<f64, WaveError> {
        let start = PhasePoint { e: 0.0, v: fraction * band_edge(mu, s0, w) };
        Ok(bloodflow_period(mu, s0, w, start)? - l_target)
    };
    let f_lo = mismatch(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = mismatch(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(WaveError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        if hi - lo <= 1e-9 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = mismatch(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{integrate_ode, Termination};
    use crate::waves::first_return_period;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    // μ = S₀ = 1, w = 2 throughout: the center regime (w² > μS₀) with
    // band edge 2 − 2^{1/3}.
    const MU: f64 = 1.0;
    const S0: f64 = 1.0;
    const W: f64 = 2.0;

    fn rhs_closure() -> impl Fn(f64, &[f64], &mut [f64]) {
        |_xi, y, dy| {
            let (de, dv) = bloodflow_rhs(MU, S0, W, PhasePoint { e: y[0], v: y[1] }).unwrap();
            dy[0] = de;
            dy[1] = dv;
        }
    }

    #[test]
    fn psi_matches_hand_computed_values() {
        // Ψ(0, 1/2) = 1/4 − 2·(−1)/(9/4) = 41/36, and Ψ at the origin is
        // exactly μS₀².
        let at_half = bloodflow_psi(MU, S0, W, PhasePoint { e: 0.0, v: 0.5 }).unwrap();
        assert_abs_diff_eq!(at_half, 41.0 / 36.0, epsilon = 1e-14);
        let at_origin = bloodflow_psi(MU, S0, W, PhasePoint { e: 0.0, v: 0.0 }).unwrap();
        assert_eq!(at_origin, MU * S0 * S0);
    }

    #[test]
    fn rhs_matches_hand_computed_values() {
        let (de, dv) = bloodflow_rhs(MU, S0, W, PhasePoint { e: 1.0, v: 0.0 }).unwrap();
        assert_eq!(de, 0.0);
        assert_abs_diff_eq!(dv, -2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn rhs_rejects_both_denominator_zeros() {
        let at_pole = bloodflow_rhs(MU, S0, W, PhasePoint { e: 0.0, v: W }).unwrap_err();
        assert!(
            matches!(at_pole, WaveError::DenominatorVanishes { which: "V - w", .. }),
            "got {at_pole:?}"
        );
        let band = W - (MU * S0 * W).cbrt();
        let at_band = bloodflow_rhs(MU, S0, W, PhasePoint { e: 0.0, v: band }).unwrap_err();
        assert!(
            matches!(at_band, WaveError::DenominatorVanishes { which: "(V - w)^3 + mu*w*S0", .. }),
            "got {at_band:?}"
        );
    }

    #[test]
    fn classify_center_saddle_and_degenerate_regimes() {
        let center = bloodflow_classify(MU, S0, W).unwrap();
        assert_eq!(center.kind, EquilibriumKind::Center);
        assert!(center.is_periodic());
        let omega = (S0 / (W * W - MU * S0)).sqrt();
        assert_abs_diff_eq!(center.eigenvalues[1].im, omega, epsilon = 1e-15);
        assert_eq!(center.eigenvalues[0].re, 0.0);

        let saddle = bloodflow_classify(1.0, 1.0, 0.5).unwrap();
        assert_eq!(saddle.kind, EquilibriumKind::Saddle);
        let rate = (1.0_f64 / 0.75).sqrt();
        assert_abs_diff_eq!(saddle.eigenvalues[1].re, rate, epsilon = 1e-15);
        assert_eq!(saddle.eigenvalues[1].im, 0.0);

        let degenerate = bloodflow_classify(1.0, 1.0, 1.0).unwrap();
        assert_eq!(degenerate.kind, EquilibriumKind::Degenerate);
    }

    #[test]
    fn turning_points_bracket_the_reference_orbit() {
        // Through (0, 1/2): the upper turning point is the start itself and
        // the lower one was frozen from a high-precision root solve.
        let psi0 = bloodflow_psi(MU, S0, W, PhasePoint { e: 0.0, v: 0.5 }).unwrap();
        let (v_lo, v_hi) = bloodflow_turning_points(MU, S0, W, psi0).unwrap();
        assert_abs_diff_eq!(v_hi, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(v_lo, -0.409_617_395_874_913_1, epsilon = 1e-9);
    }

    #[test]
    fn equilibrium_energy_degenerates_to_the_origin() {
        let (v_lo, v_hi) = bloodflow_turning_points(MU, S0, W, MU * S0 * S0).unwrap();
        assert_eq!((v_lo, v_hi), (0.0, 0.0));
    }

    #[test]
    fn energy_below_the_equilibrium_is_rejected() {
        let err = bloodflow_turning_points(MU, S0, W, 0.9).unwrap_err();
        assert!(matches!(err, WaveError::EnergyBelowEquilibrium { .. }), "got {err:?}");
    }

    #[test]
    fn open_orbit_reports_the_side_it_found() {
        // Ψ(0, −1) = 17/9 exceeds the band-edge hump of g, so no upper
        // turning point exists; the lower one is −1 (the starting V itself).
        let psi0 = bloodflow_psi(MU, S0, W, PhasePoint { e: 0.0, v: -1.0 }).unwrap();
        assert_abs_diff_eq!(psi0, 17.0 / 9.0, epsilon = 1e-14);
        let err = bloodflow_turning_points(MU, S0, W, psi0).unwrap_err();
        match err {
            WaveError::OrbitNotClosed { lower: Some(v_lo), upper: None, .. } => {
                assert_abs_diff_eq!(v_lo, -1.0, epsilon = 1e-9);
            }
            other => panic!("expected a one-sided open orbit, got {other:?}"),
        }
    }

    #[test]
    fn period_agrees_between_quadrature_and_orbit_following() {
        // Frozen from a high-precision evaluation of the turning-point
        // integral; the ODE follow-around must land on the same value.
        let quadrature = bloodflow_period(MU, S0, W, PhasePoint { e: 0.0, v: 0.5 }).unwrap();
        assert_abs_diff_eq!(quadrature, 10.665320220786285, epsilon = 1e-6);

        let followed = first_return_period(rhs_closure(), &[0.0, 0.5], 40.0, 1e-10).unwrap();
        assert!(
            (followed.period - quadrature).abs() <= 1e-4 * quadrature,
            "quadrature {quadrature} vs follow-around {}",
            followed.period
        );
        assert!(followed.closure_gap <= 1e-5, "orbit failed to close: {}", followed.closure_gap);
    }

    #[test]
    fn small_orbits_approach_the_linearized_period() {
        let period = bloodflow_period(MU, S0, W, PhasePoint { e: 0.0, v: 1e-3 }).unwrap();
        let omega = (S0 / (W * W - MU * S0)).sqrt();
        let linear = 2.0 * PI / omega;
        assert!(
            (period - linear).abs() <= 1e-4 * linear,
            "period {period} vs linearized {linear}"
        );
    }

    #[test]
    fn starting_outside_the_band_is_rejected() {
        let band = W - (MU * S0 * W).cbrt();
        let err =
            bloodflow_period(MU, S0, W, PhasePoint { e: 0.0, v: 1.1 * band }).unwrap_err();
        assert!(matches!(err, WaveError::OutsideBand { .. }), "got {err:?}");
    }

    #[test]
    fn period_in_the_saddle_regime_is_rejected() {
        let err = bloodflow_period(1.0, 1.0, 0.5, PhasePoint { e: 0.0, v: 0.1 }).unwrap_err();
        assert!(
            matches!(err, WaveError::NotACenter { found: EquilibriumKind::Saddle, .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn period_of_the_point_orbit_is_rejected() {
        let err = bloodflow_period(MU, S0, W, PhasePoint { e: 0.0, v: 0.0 }).unwrap_err();
        assert!(matches!(err, WaveError::DegenerateOrbit { .. }), "got {err:?}");
    }

    #[test]
    fn speed_recovers_from_its_own_perimeter() {
        // Perimeter of the half-band orbit at w = 2, frozen from the same
        // quadrature; the inverse solve must return w to within 1e-4.
        let band = W - (MU * S0 * W).cbrt();
        let l_target =
            bloodflow_period(MU, S0, W, PhasePoint { e: 0.0, v: 0.5 * band }).unwrap();
        assert_abs_diff_eq!(l_target, 10.764230048975035, epsilon = 1e-6);
        let w = bloodflow_speed_for_perimeter(MU, S0, l_target, 0.5, (1.2, 5.0)).unwrap();
        assert_abs_diff_eq!(w, W, epsilon = 1e-4);
    }

    #[test]
    fn tiny_amplitude_speed_solve_matches_the_linearized_period() {
        // At vanishing amplitude the perimeter tends to 2π/ω(w); feeding
        // that target back at fraction 1e-3 must recover the speed.
        let omega = (S0 / (W * W - MU * S0)).sqrt();
        let w = bloodflow_speed_for_perimeter(MU, S0, 2.0 * PI / omega, 1e-3, (1.2, 5.0))
            .unwrap();
        assert_abs_diff_eq!(w, W, epsilon = 1e-3);
    }

    #[test]
    fn unbracketed_speed_solve_is_rejected() {
        let err =
            bloodflow_speed_for_perimeter(MU, S0, 100.0, 0.5, (1.2, 5.0)).unwrap_err();
        assert!(matches!(err, WaveError::NoSignChange { .. }), "got {err:?}");
    }

    #[test]
    fn psi_is_conserved_along_the_flow() {
        let start = PhasePoint { e: 0.0, v: 0.5 };
        let psi0 = bloodflow_psi(MU, S0, W, start).unwrap();
        let traj =
            integrate_ode(rhs_closure(), (0.0, 10.67), &[start.e, start.v], 1e-10, 1e-12, None)
                .unwrap();
        assert_eq!(traj.termination, Termination::ReachedEnd);
        let bound = 1e-6 * psi0.abs().max(1.0);
        for y in &traj.states {
            let psi = bloodflow_psi(MU, S0, W, PhasePoint { e: y[0], v: y[1] }).unwrap();
            assert!((psi - psi0).abs() <= bound, "drift {:.3e}", (psi - psi0).abs());
        }
    }

    #[test]
    fn flipping_e_and_running_backward_gives_the_same_arc() {
        // The system is invariant under (𝓔, ξ) → (−𝓔, −ξ): the forward arc
        // from (−𝓔₀, 𝒱₀) must mirror the backward arc from (𝓔₀, 𝒱₀).
        let span = (0.0, 2.0);
        let reversed = |_xi: f64, y: &[f64], dy: &mut [f64]| {
            let (de, dv) = bloodflow_rhs(MU, S0, W, PhasePoint { e: y[0], v: y[1] }).unwrap();
            dy[0] = -de;
            dy[1] = -dv;
        };
        let backward = integrate_ode(reversed, span, &[0.3, 0.2], 1e-10, 1e-12, None).unwrap();
        let mirrored = integrate_ode(rhs_closure(), span, &[-0.3, 0.2], 1e-10, 1e-12, None)
            .unwrap();
        let b = backward.last_state();
        let m = mirrored.last_state();
        assert_abs_diff_eq!(m[0], -b[0], epsilon = 1e-8);
        assert_abs_diff_eq!(m[1], b[1], epsilon = 1e-8);
    }
}
