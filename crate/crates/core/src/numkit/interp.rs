//! Interpolation helpers: natural cubic splines (sampled-table profiles) and
//! monotone PCHIP (inverting strictly increasing characteristic positions).

use super::NumError;

fn validate_nodes(x: &[f64], y: &[f64], min_len: usize) -> Result<(), NumError> {
    if x.len() != y.len() {
        return Err(NumError::DimensionMismatch {
            context: format!("interpolation nodes: {} x-values vs {} y-values", x.len(), y.len()),
        });
    }
    if x.len() < min_len {
        return Err(NumError::InvalidArgument {
            arg: "x",
            reason: format!("need at least {min_len} nodes, got {}", x.len()),
        });
    }
    for w in x.windows(2) {
        // Written so that NaN entries fail the comparison and are rejected.
        let ordered = w[1] > w[0];
        if !ordered {
            return Err(NumError::InvalidArgument {
                arg: "x",
                reason: format!("nodes must be strictly increasing; found {} then {}", w[0], w[1]),
            });
        }
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(NumError::NonFinite { context: "interpolation nodes".into() });
    }
    Ok(())
}

/// Locates the segment index i with x[i] <= t < x[i+1], clamped to the ends
/// so out-of-range queries extrapolate with the boundary polynomial.
fn segment(x: &[f64], t: f64) -> usize {
    match x.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => i.min(x.len() - 2),
        Err(i) => i.saturating_sub(1).min(x.len() - 2),
    }
}

/// Natural cubic spline: C² interpolant with zero second derivative at both
/// ends. Supports value and first-derivative evaluation.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self, NumError> {
        validate_nodes(x, y, 2)?;
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior tridiagonal system.
            let mut sub = vec![0.0; n - 2];
            let mut diag = vec![0.0; n - 2];
            let mut sup = vec![0.0; n - 2];
            let mut rhs = vec![0.0; n - 2];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                sub[i - 1] = h0;
                diag[i - 1] = 2.0 * (h0 + h1);
                sup[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..n - 2 {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 2] = rhs[n - 3] / diag[n - 3];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i - 1] - sup[i - 1] * m[i + 1]) / diag[i - 1];
            }
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = segment(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = segment(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes):
/// never overshoots the data, so it is safe for inverting monotone tables.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    /// First derivatives at the nodes.
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self, NumError> {
        validate_nodes(x, y, 2)?;
        let n = x.len();
        let mut d = vec![0.0; n];
        if n == 2 {
            let s = (y[1] - y[0]) / (x[1] - x[0]);
            d[0] = s;
            d[1] = s;
        } else {
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
            for i in 1..n - 1 {
                if s[i - 1] * s[i] <= 0.0 {
                    d[i] = 0.0;
                } else {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d[0] = edge_slope(h[0], h[1], s[0], s[1]);
            d[n - 1] = edge_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), d })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = segment(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h * h10 * self.d[i] + h01 * self.y[i + 1] + h * h11 * self.d[i + 1]
    }
}

/// One-sided three-point endpoint slope with the standard monotonicity clamp.
fn edge_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        0.0
    } else if s0 * s1 < 0.0 && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn spline_reproduces_linear_data_exactly() {
        let x = grid(-1.0, 3.0, 7);
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t - 5.0).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for t in [-1.0, -0.3, 0.77, 2.9] {
            assert_abs_diff_eq!(s.eval(t), 2.0 * t - 5.0, epsilon = 1e-13);
            assert_abs_diff_eq!(s.deriv(t), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spline_interpolates_sine_with_small_error() {
        let x = grid(0.0, std::f64::consts::TAU, 64);
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::new(&x, &y).unwrap();
        for k in 0..400 {
            let t = std::f64::consts::TAU * k as f64 / 400.0;
            assert_abs_diff_eq!(s.eval(t), t.sin(), epsilon = 1e-5);
            assert_abs_diff_eq!(s.deriv(t), t.cos(), epsilon = 1e-3);
        }
    }

    #[test]
    fn spline_hits_nodes_exactly() {
        let x = [0.0, 0.4, 1.1, 2.0];
        let y = [1.0, -2.0, 0.5, 3.0];
        let s = CubicSpline::new(&x, &y).unwrap();
        for (xi, yi) in x.iter().zip(y.iter()) {
            assert_abs_diff_eq!(s.eval(*xi), *yi, epsilon = 1e-14);
        }
    }

    #[test]
    fn pchip_preserves_monotone_data() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 0.1, 0.11, 5.0, 5.1];
        let p = Pchip::new(&x, &y).unwrap();
        let mut prev = p.eval(0.0);
        for k in 1..=400 {
            let t = 4.0 * k as f64 / 400.0;
            let v = p.eval(t);
            assert!(v >= prev - 1e-12, "overshoot at t={t}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn pchip_is_exact_on_linear_data() {
        let x = grid(0.0, 1.0, 5);
        let y: Vec<f64> = x.iter().map(|t| -3.0 * t + 1.0).collect();
        let p = Pchip::new(&x, &y).unwrap();
        assert_abs_diff_eq!(p.eval(0.37), -3.0 * 0.37 + 1.0, epsilon = 1e-14);
    }

    #[test]
    fn unordered_nodes_are_rejected() {
        match CubicSpline::new(&[0.0, 0.0, 1.0], &[1.0, 2.0, 3.0]) {
            Err(NumError::InvalidArgument { arg, .. }) => assert_eq!(arg, "x"),
            other => panic!("expected InvalidArgument, got {other:?}"),
        }
    }
}
