//! Self-contained numerical kernels. Everything here is dimension-agnostic
//! and knows nothing about the systems built on top.

mod interp;
mod matrix;
mod ode;
mod poly;
mod quad;
mod roots;

pub use interp::{CubicSpline, Pchip};
pub use matrix::{expm, Matrix};
pub(crate) use ode::integrate_to;
pub use ode::{integrate_ode, OdeTrajectory, StateGuard, Termination};
pub use poly::poly_roots;
pub use quad::quad_sqrt_singular;
pub use roots::{bisect_root, find_first_root, Root, RootKind};

use thiserror::Error;

/// Errors shared by the numerical kernels.
#[derive(Debug, Error)]
pub enum NumError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: String },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("matrix is numerically singular (pivot {pivot:.3e} at column {col})")]
    SingularMatrix { pivot: f64, col: usize },
    #[error("function evaluated to a non-finite value at t = {t}")]
    NonFiniteEval { t: f64 },
    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },
    #[error("integration exceeded {max_steps} steps")]
    TooManySteps { max_steps: usize },
    #[error(
        "quadrature did not reach tolerance {tol:.3e}: estimate {estimate:.17e}, error {error:.3e}"
    )]
    QuadratureNonConvergence { estimate: f64, error: f64, tol: f64 },
}
