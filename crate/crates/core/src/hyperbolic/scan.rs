//! Precomputed scan table for the flow-map factor q(t).
//!
//! q(t; x₀) is the first component of exp(M·t)·(1, V₀′(x₀)), linear in the
//! augmented derivative vector. The scan grid t_k = k·Δt is shared by every
//! x₀, so the table of first rows of exp(M·t_k) is built once per
//! (system, horizon, step) and each x₀ costs only one dot product per scan
//! point. Refinement of a bracketed sign change evaluates exp(M·t) exactly.

use crate::numkit::{bisect_root, expm, Matrix, NumError, Root, RootKind};

use super::{augmented_matrix, SystemSpec};

/// Shared q(t) scan table; build once, probe per initial derivative.
#[derive(Debug, Clone)]
pub struct QScan {
    m: Matrix,
    dim: usize,
    t_max: f64,
    dt: f64,
    steps: usize,
    tol: f64,
    /// First rows of exp(M·t_k), k = 0..=steps, flattened (stride `dim`).
    rows: Vec<f64>,
}

impl QScan {
    pub fn new(
        sys: &SystemSpec,
        t_max: f64,
        scan_step: f64,
        tol: f64,
    ) -> Result<Self, NumError> {
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

        let m = augmented_matrix(sys);
        let dim = sys.n + 1;
        let steps = (t_max / scan_step).ceil() as usize;
        let step_matrix = expm(&m, scan_step)?;

        let mut rows = Vec::with_capacity((steps + 1) * dim);
        let mut p = Matrix::identity(dim);
        rows.extend_from_slice(p.row(0));
        for k in 1..=steps {
            if k == steps && (k as f64) * scan_step > t_max {
                // Final scan point is clamped to t_max; use the exact value.
                let clamped = expm(&m, t_max)?;
                rows.extend_from_slice(clamped.row(0));
            } else {
                p = p.matmul(&step_matrix);
                rows.extend_from_slice(p.row(0));
            }
        }

        Ok(Self { m, dim, t_max, dt: scan_step, steps, tol, rows })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn scan_time(&self, k: usize) -> f64 {
        (k as f64 * self.dt).min(self.t_max)
    }

    /// Exact q(t) for the augmented vector (1, deriv).
    fn q_exact(&self, t: f64, aug: &[f64]) -> f64 {
        match expm(&self.m, t) {
            Ok(e) => e.row(0).iter().zip(aug).map(|(a, b)| a * b).sum(),
            Err(_) => f64::NAN,
        }
    }

    /// First positive root of q(t; ·) on (0, t_max] for one initial
    /// derivative vector V₀′(x₀), with the same detection semantics as
    /// [`crate::numkit::find_first_root`]: touching zeros (|q| ≤ tol at a
    /// scan point) are reported at the scan point, sign changes are bisected
    /// to width tol.
    pub fn first_root(&self, deriv: &[f64]) -> Result<Option<Root>, NumError> {
        if deriv.len() + 1 != self.dim {
            return Err(NumError::DimensionMismatch {
                context: format!(
                    "q scan expects a derivative vector of length {}, got {}",
                    self.dim - 1,
                    deriv.len()
                ),
            });
        }
        let mut aug = Vec::with_capacity(self.dim);
        aug.push(1.0);
        aug.extend_from_slice(deriv);

        let mut q_prev = self.dot(0, &aug);
        // q(0) = 1 by construction: the flow map starts as the identity.
        assert!(
            (q_prev - 1.0).abs() < 1e-9,
            "q(0) = {q_prev}, expected exactly 1"
        );
        if q_prev.abs() <= self.tol {
            return Ok(Some(Root { t: 0.0, kind: RootKind::Touch }));
        }

        for k in 1..=self.steps {
            let t = self.scan_time(k);
            let q = self.dot(k, &aug);
            if !q.is_finite() {
                return Err(NumError::NonFiniteEval { t });
            }
            if q.abs() <= self.tol {
                return Ok(Some(Root { t, kind: RootKind::Touch }));
            }
            if q_prev * q < 0.0 {
                let f = |t: f64| self.q_exact(t, &aug);
                let root = bisect_root(&f, self.scan_time(k - 1), t, q_prev, self.tol)?;
                return Ok(Some(Root { t: root, kind: RootKind::SignChange }));
            }
            q_prev = q;
        }
        Ok(None)
    }

    fn dot(&self, k: usize, aug: &[f64]) -> f64 {
        let row = &self.rows[k * self.dim..(k + 1) * self.dim];
        row.iter().zip(aug).map(|(a, b)| a * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::find_first_root;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn cold_plasma() -> SystemSpec {
        SystemSpec::new(
            "cold_plasma",
            Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn pure_cosine_q_roots_at_half_pi() {
        let scan = QScan::new(&cold_plasma(), 10.0, 0.01, 1e-10).unwrap();
        let r = scan.first_root(&[0.0, 1.0]).unwrap().unwrap();
        assert_eq!(r.kind, RootKind::SignChange);
        assert_abs_diff_eq!(r.t, FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn strictly_positive_q_has_no_root() {
        // q(t) = 0.7 + 0.3 cos t ≥ 0.4 on any horizon.
        let scan = QScan::new(&cold_plasma(), 100.0, 0.01, 1e-9).unwrap();
        assert!(scan.first_root(&[0.0, 0.3]).unwrap().is_none());
        assert!(scan.first_root(&[0.0, 0.0]).unwrap().is_none());
    }

    #[test]
    fn scan_table_matches_direct_first_root_search() {
        // Dual route: the multiplied-up table against a fresh exp(M·t)
        // evaluation inside the generic scanner, same step and tolerance.
        let sys = cold_plasma();
        let m = augmented_matrix(&sys);
        let scan = QScan::new(&sys, 12.0, 0.02, 1e-10).unwrap();
        let cases: [[f64; 2]; 5] =
            [[0.3, 0.9], [-1.2, 0.4], [0.0, -0.8], [2.0, 1.5], [0.1, 0.45]];
        for deriv in cases {
            let aug = vec![1.0, deriv[0], deriv[1]];
            let f = |t: f64| {
                let e = expm(&m, t).unwrap();
                e.row(0).iter().zip(&aug).map(|(a, b)| a * b).sum::<f64>()
            };
            let direct = find_first_root(f, 12.0, 0.02, 1e-10).unwrap();
            let table = scan.first_root(&deriv).unwrap();
            match (direct, table) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    assert_abs_diff_eq!(a.t, b.t, epsilon = 1e-8);
                    assert_eq!(a.kind, b.kind);
                }
                other => panic!("routes disagree for {deriv:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn wrong_derivative_length_is_reported() {
        let scan = QScan::new(&cold_plasma(), 1.0, 0.1, 1e-9).unwrap();
        assert!(matches!(
            scan.first_root(&[1.0]),
            Err(NumError::DimensionMismatch { .. })
        ));
    }
}
