//! Polynomial root finding for the small characteristic polynomials arising
//! in traveling-wave linearizations (degree ≤ 4 in practice).

use num_complex::Complex64;

use super::NumError;

/// All complex roots of Σ coeffs[k]·z^k (coefficients low-to-high).
///
/// Degrees 1 and 2 are solved in closed form; higher degrees use
/// Durand–Kerner iteration followed by a Newton polish. Roots are returned
/// sorted by (real, imaginary) part for reproducibility.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, NumError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(NumError::NonFinite { context: "polynomial coefficients".into() });
    }
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return if c.is_empty() {
            Err(NumError::InvalidArgument {
                arg: "coeffs",
                reason: "identically zero polynomial has no defined root set".into(),
            })
        } else {
            Ok(Vec::new())
        };
    }

    // Exact zero roots: factor out trailing zero constant terms first.
    let mut roots: Vec<Complex64> = Vec::with_capacity(c.len() - 1);
    while c[0] == 0.0 && c.len() > 1 {
        roots.push(Complex64::new(0.0, 0.0));
        c.remove(0);
    }

    match c.len() {
        1 => {}
        2 => roots.push(Complex64::new(-c[0] / c[1], 0.0)),
        3 => roots.extend(quadratic_roots(c[0], c[1], c[2])),
        _ => roots.extend(durand_kerner(&c)),
    }

    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Stable quadratic formula for a + b·z + c·z² = 0 (c ≠ 0).
fn quadratic_roots(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        if q == 0.0 {
            // b = 0 and disc = 0: double root at zero.
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q / c, 0.0), Complex64::new(a / q, 0.0)]
    } else {
        let re = -b / (2.0 * c);
        let im = (-disc).sqrt() / (2.0 * c);
        [Complex64::new(re, -im.abs()), Complex64::new(re, im.abs())]
    }
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (0..c.len()).rev() {
        acc = acc * z + c[k];
    }
    acc
}

fn horner_deriv(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..c.len()).rev() {
        acc = acc * z + c[k] * k as f64;
    }
    acc
}

fn durand_kerner(c: &[f64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    // Work on the monic polynomial for stable iteration.
    let lead = c[deg];
    let monic: Vec<Complex64> =
        c.iter().map(|&v| Complex64::new(v / lead, 0.0)).collect();
    let radius = 1.0 + c[..deg].iter().map(|v| (v / lead).abs()).fold(0.0, f64::max);

    // Standard non-symmetric starting spiral.
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| seed.powu(k as u32 + 1) * radius)
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for k in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Collided iterates: nudge and continue.
                z[k] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                max_step = f64::INFINITY;
                continue;
            }
            let step = horner(&monic, z[k]) / denom;
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if max_step < 1e-14 {
            break;
        }
    }

    // Newton polish sharpens each root to the limit of f64.
    for zk in z.iter_mut() {
        for _ in 0..4 {
            let dp = horner_deriv(&monic, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            *zk -= horner(&monic, *zk) / dp;
        }
        // Snap near-real roots onto the axis (conjugate pairing in f64).
        if zk.im.abs() < 1e-12 * (1.0 + zk.re.abs()) {
            zk.im = 0.0;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cubic_with_integer_roots() {
        // (z−1)(z−2)(z−3) = −6 + 11z − 6z² + z³
        let r = poly_roots(&[-6.0, 11.0, -6.0, 1.0]).unwrap();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-10);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn quadratic_conjugate_pair() {
        let r = poly_roots(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].im, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1].im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[0].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn stable_quadratic_avoids_cancellation() {
        // z² − 1e8·z + 1 has roots ~1e8 and ~1e−8; naive formula loses the
        // small one entirely.
        let r = poly_roots(&[1.0, -1e8, 1.0]).unwrap();
        let small = r.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(small, 1e-8, epsilon = 1e-16);
    }

    #[test]
    fn zero_constant_terms_become_exact_zero_roots() {
        // z²·(z − 5)
        let r = poly_roots(&[0.0, 0.0, -5.0, 1.0]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], Complex64::new(0.0, 0.0));
        assert_eq!(r[1], Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(r[2].re, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn quartic_with_two_conjugate_pairs() {
        // (z²+1)(z²+4) = 4 + 5z² + z⁴
        let r = poly_roots(&[4.0, 0.0, 5.0, 0.0, 1.0]).unwrap();
        let mut ims: Vec<f64> = r.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        for (got, want) in ims.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-10);
        }
        for z in &r {
            assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn residual_is_small_for_random_quartic() {
        let coeffs = [0.7, -1.3, 0.25, 2.0, 1.0];
        let r = poly_roots(&coeffs).unwrap();
        assert_eq!(r.len(), 4);
        for z in &r {
            let mut p = Complex64::new(0.0, 0.0);
            for k in (0..coeffs.len()).rev() {
                p = p * z + Complex64::new(coeffs[k], 0.0);
            }
            assert!(p.norm() < 1e-10, "residual {} at root {z}", p.norm());
        }
    }

    #[test]
    fn constant_polynomial_has_no_roots() {
        assert!(poly_roots(&[3.0]).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(poly_roots(&[0.0, 0.0]).is_err());
    }
}
