//! Relative error norms, convergence-slope fitting and the exact
//! absolute-stability bound of small dense linear systems.

mod error;
mod slope;
mod stability;

use thiserror::Error;

pub use error::{
    aggregate_error, component_norms, relative_error_space, state_norms, ComponentNorms, ErrorAccumulator, ErrorSeries,
};
pub use slope::fit_slope;
pub use stability::{exact_stability_bound, SpectralBound};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("exact solution component {component} has zero norm")]
    ZeroExactNorm { component: usize },
    #[error("shape mismatch: expected length {expected}, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("error series is empty")]
    EmptySeries,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigenvalue {re:+.3e}{im:+.3e}i has nonnegative real part")]
    NotStable { re: f64, im: f64 },
    #[error("matrix is numerically defective (eigenvector condition number {0:.3e})")]
    Defective(f64),
}

pub type Result<T> = std::result::Result<T, MetricsError>;
