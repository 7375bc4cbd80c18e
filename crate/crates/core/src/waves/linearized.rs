//! Mode roots of the wave-frame profile equations linearized at the zero
//! state.
//!
//! Substituting a mode e^{ξ/λ} into the linearized viscous profile equation
//! νw𝒱‴ + w²𝒱″ + 𝒱 = 0 and clearing the powers of λ gives
//!     λ³ + w²λ + νw = 0,
//! and for the doubly-dissipative stratified equation
//! νκ𝒮⁗ + (ν+κ)w𝒮‴ + w²𝒮″ + 𝒮 = 0 likewise
//!     λ⁴ + w²λ² + (ν+κ)wλ + νκ = 0.
//! The λ convention (reciprocal of the growth exponent) keeps the
//! dissipation-free limit at λ = ±iw; the actual exponent of each mode is
//! 1/λ, which shares the sign of its real part, so stability statements read
//! the same in either convention.  Zero roots of these polynomials
//! correspond to infinitely fast modes that the original equations do not
//! possess — they appear only because clearing denominators raises the
//! degree — and are excluded from the result.

use num_complex::Complex64;

use super::{classify_eigenvalues, EquilibriumClass, WaveError};
use crate::numkit::poly_roots;

/// Which dissipative traveling-wave linearization to analyze.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwModel {
    /// Single viscosity ν.
    ColdPlasmaViscous { nu: f64 },
    /// Viscosity ν and diffusivity κ.
    Stratified { nu: f64, kappa: f64 },
}

fn check_coefficient(name: &'static str, value: f64) -> Result<(), WaveError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(WaveError::BadCoefficient { name, value })
    }
}

/// Mode roots λ (modes e^{ξ/λ}) of the profile equations linearized at the
/// zero state, classified by where they sit relative to the imaginary axis.
///
/// Without dissipation the roots are exactly ±iw (built directly, not via
/// the polynomial solver) and the state is a center; any positive
/// dissipation moves a conjugate pair off the axis, so the zero state stops
/// being periodic.
pub fn linearized_tw_roots(model: TwModel, w: f64) -> Result<EquilibriumClass, WaveError> {
    if !w.is_finite() {
        return Err(WaveError::BadCoefficient { name: "w", value: w });
    }
    if w == 0.0 {
        return Err(WaveError::ZeroWaveSpeed);
    }

    let dissipation_free = Ok(classify_eigenvalues(vec![
        Complex64::new(0.0, -w.abs()),
        Complex64::new(0.0, w.abs()),
    ]));

    let coeffs: Vec<f64> = match model {
        TwModel::ColdPlasmaViscous { nu } => {
            check_coefficient("nu", nu)?;
            if nu == 0.0 {
                return dissipation_free;
            }
            // λ³ + w²λ + νw, low to high degree.
            vec![nu * w, w * w, 0.0, 1.0]
        }
        TwModel::Stratified { nu, kappa } => {
            check_coefficient("nu", nu)?;
            check_coefficient("kappa", kappa)?;
            if nu == 0.0 && kappa == 0.0 {
                return dissipation_free;
            }
            // λ⁴ + w²λ² + (ν+κ)wλ + νκ, low to high degree.
            vec![nu * kappa, (nu + kappa) * w, w * w, 0.0, 1.0]
        }
    };

    let mut roots = poly_roots(&coeffs)?;
    // With exactly one of ν, κ zero the quartic loses its constant term and
    // the solver factors out an exact zero root; drop it (see module doc).
    roots.retain(|z| z.norm() > 0.0);
    Ok(classify_eigenvalues(roots))
}
