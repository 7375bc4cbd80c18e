//! Small dense row-major matrices and the matrix exponential.
//!
//! Sizes here are tiny (the systems served are n ≤ 4, augmented n+1 ≤ 5), so
//! plain Gaussian elimination with partial pivoting and scaling-and-squaring
//! Padé are both exact enough and fast enough; no BLAS backing is warranted.

use super::NumError;

/// Dense row-major matrix of `f64`, semantic order = equation order.
///
/// Invariant: all entries finite (enforced on construction).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from row slices; fails on ragged rows or non-finite entries.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, NumError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(NumError::DimensionMismatch {
                    context: format!("ragged rows: expected {c} entries, got {}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        let m = Matrix { rows: r, cols: c, data };
        m.check_finite("matrix entries")?;
        Ok(m)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumError> {
        if data.len() != rows * cols {
            return Err(NumError::DimensionMismatch {
                context: format!("{rows}x{cols} matrix from {} values", data.len()),
            });
        }
        let m = Matrix { rows, cols, data };
        m.check_finite("matrix entries")?;
        Ok(m)
    }

    pub fn diag(entries: &[f64]) -> Result<Self, NumError> {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m.check_finite("diagonal entries")?;
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn check_finite(&self, context: &str) -> Result<(), NumError> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(NumError::NonFinite { context: context.to_string() })
        }
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let (r, k, c) = (self.rows, self.cols, other.cols);
        let mut out = Matrix::zeros(r, c);
        for i in 0..r {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..c {
                    out.data[i * c + j] += a * other.data[l * c + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Solves `self · X = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, NumError> {
        if !self.is_square() {
            return Err(NumError::NotSquare { rows: self.rows, cols: self.cols });
        }
        if rhs.rows != self.rows {
            return Err(NumError::DimensionMismatch {
                context: format!("solve: lhs {}x{}, rhs {} rows", self.rows, self.cols, rhs.rows),
            });
        }
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        for col in 0..n {
            let mut piv = col;
            let mut piv_val = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > piv_val {
                    piv = r;
                    piv_val = v;
                }
            }
            if piv_val < 1e-300 {
                return Err(NumError::SingularMatrix { pivot: piv_val, col });
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                for j in 0..m {
                    b.swap(col * m + j, piv * m + j);
                }
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                for j in 0..m {
                    b[r * m + j] -= f * b[col * m + j];
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for j in 0..m {
                let mut s = b[col * m + j];
                for l in col + 1..n {
                    s -= a[col * n + l] * b[l * m + j];
                }
                b[col * m + j] = s / d;
            }
        }
        Matrix::from_vec(n, m, b)
    }
}

// Padé order thresholds for the 1-norm of the scaled argument (double
// precision backward-error bounds).
const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

/// `exp(M·t)` by scaling-and-squaring with a diagonal Padé core.
///
/// Entrywise absolute accuracy is ~1e-14 relative to the result magnitude for
/// `‖M·t‖ ≤ 50`; for the rotation-type generators used by the characteristic
/// machinery the entries stay O(1), so this meets the 1e-12 absolute target.
pub fn expm(m: &Matrix, t: f64) -> Result<Matrix, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if !t.is_finite() {
        return Err(NumError::NonFinite { context: "expm time argument".to_string() });
    }
    m.check_finite("expm matrix argument")?;
    let a = m.scale(t);
    let norm = a.one_norm();
    for &(order, theta) in &THETA {
        if norm <= theta {
            return pade(&a, order);
        }
    }
    let squarings = if norm <= THETA_13 {
        0
    } else {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    };
    let scaled = a.scale(0.5f64.powi(squarings as i32));
    let mut e = pade(&scaled, 13)?;
    for _ in 0..squarings {
        e = e.matmul(&e);
    }
    Ok(e)
}

// Coefficients of the diagonal Padé numerator p_m; the denominator uses the
// same coefficients with alternating signs.
fn pade_coeffs(order: usize) -> &'static [f64] {
    match order {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17_297_280.0, 8_648_640.0, 1_995_840.0, 277_200.0, 25_200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17_643_225_600.0,
            8_821_612_800.0,
            2_075_673_600.0,
            302_702_400.0,
            30_270_240.0,
            2_162_160.0,
            110_880.0,
            3960.0,
            90.0,
            1.0,
        ],
        13 => &[
            6.476_475_253_248e16,
            3.238_237_626_624e16,
            7.771_770_303_897_6e15,
            1.187_353_796_428_8e15,
            1.290_601_952_64e14,
            1.055_947_052_16e13,
            6.704_425_728e11,
            3.352_212_864e10,
            1.323_241_92e9,
            4.084_08e7,
            960_960.0,
            16380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("unsupported Padé order"),
    }
}

fn pade(a: &Matrix, order: usize) -> Result<Matrix, NumError> {
    let n = a.rows();
    let b = pade_coeffs(order);
    let a2 = a.matmul(a);
    // u = A·(odd terms in A²), v = even terms in A².
    let (u, v) = if order <= 9 {
        let mut pow = Matrix::identity(n);
        let mut u_inner = Matrix::zeros(n, n);
        let mut v = Matrix::zeros(n, n);
        for (k, &bk) in b.iter().enumerate() {
            if k % 2 == 1 {
                u_inner = u_inner.add(&pow.scale(bk));
            } else {
                v = v.add(&pow.scale(bk));
            }
            if k % 2 == 1 && k < order {
                pow = pow.matmul(&a2);
            }
        }
        (a.matmul(&u_inner), v)
    } else {
        let a4 = a2.matmul(&a2);
        let a6 = a4.matmul(&a2);
        let u_hi = a6
            .matmul(&a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9])));
        let u_lo = a6.scale(b[7]).add(&a4.scale(b[5])).add(&a2.scale(b[3]));
        let u = a.matmul(&u_hi.add(&u_lo).add(&Matrix::identity(n).scale(b[1])));
        let v_hi = a6
            .matmul(&a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8])));
        let v = v_hi
            .add(&a6.scale(b[6]))
            .add(&a4.scale(b[4]))
            .add(&a2.scale(b[2]))
            .add(&Matrix::identity(n).scale(b[0]));
        (u, v)
    };
    // exp(A) ≈ (V - U)⁻¹ (V + U)
    v.sub(&u).solve(&v.add(&u))
}
