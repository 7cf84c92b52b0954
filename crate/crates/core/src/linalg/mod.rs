//! Dense and sparse linear-algebra kernels used by the integrators.
//!
//! Everything here works on plain `&[f64]` slices and `Vec<f64>` columns.
//! The reduced problems handled by the time-steppers are small (tens of
//! columns), while the full-order operators are large and sparse, so the
//! module keeps the two worlds separate: [`CsrMatrix`] with [`gmres`] and
//! [`IluPrecond`] for the full order, [`DenseMatrix`] and [`dense_solve`] for
//! the reduced order, and [`QrFactor`] / [`OrthoBasis`] to move between them.

mod cond;
mod dense;
mod gmres;
mod ilu;
mod ortho;
mod qr;
mod sparse;
pub mod vector;

pub use cond::{
    cond2_estimate, lanczos_extreme_eigenvalue, singular_value_bounds, singular_value_bounds_seeded, CondEstimate,
};
pub use dense::{dense_solve, DenseMatrix};
pub use gmres::{gmres, GmresOptions, GmresOutcome, Preconditioner};
pub use ilu::{ilu_factor, IluPrecond};
pub use ortho::{gs_extend, orth_residual, OrthoBasis};
pub use qr::QrFactor;
pub use sparse::{spmv, CsrMatrix, TripletBuilder};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),
    #[error("GMRES breakdown at iteration {iteration} (relative residual {residual:.3e})")]
    Breakdown { iteration: usize, residual: f64 },
    #[error("zero pivot in incomplete LU at row {row}")]
    ZeroPivot { row: usize },
    #[error("singular matrix (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("cannot extend basis with a zero-norm vector")]
    ZeroVector,
    #[error("condition estimate failed: {0}")]
    Estimate(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
