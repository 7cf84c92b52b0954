//! Semidiscrete ODE systems `y' = f(t, y)` and the finite-difference
//! benchmark problems.

mod advdiff;
mod burgers;
mod grid;
mod lifting;

use std::borrow::Cow;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::CsrMatrix;

pub use advdiff::{advdiff_forcing, build_advdiff, AdvDiffParams, AdvDiffSystem, GaussianBlob};
pub use burgers::{build_burgers, BurgersExact, BurgersSystem};
pub use grid::Grid;
pub use lifting::{sample_on_grid, Lifting};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("grid needs at least 3 nodes per direction, got {0}")]
    GridTooCoarse(usize),
    #[error("only 2D and 3D grids are supported, got {0}D")]
    UnsupportedDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: expected length {expected}, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, ProblemError>;

/// Right-hand side of `y'(t) = f(t, y(t))` together with its Jacobian.
pub trait SemidiscreteSystem: Send + Sync {
    /// Number of unknowns `N_h`.
    fn n_dof(&self) -> usize;

    /// Number of solution components `K` (unknowns are component-major).
    fn n_components(&self) -> usize {
        1
    }

    /// Writes `f(t, y)` into `out`.
    fn eval_f(&self, t: f64, y: &[f64], out: &mut [f64]);

    /// Sparse Jacobian `df/dy` at `(t, y)`. The sparsity pattern is fixed.
    fn jacobian(&self, t: f64, y: &[f64]) -> Cow<'_, CsrMatrix>;

    /// The constant matrix `A` when `f(t, y) = A y + b(t)`.
    fn linear_operator(&self) -> Option<&CsrMatrix> {
        None
    }

    fn is_linear(&self) -> bool {
        self.linear_operator().is_some()
    }

    fn eval(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dof()];
        self.eval_f(t, y, &mut out);
        out
    }
}

/// Closed-form field `u(x, t)` with `K` components, used both as the exact
/// solution of a benchmark and as the source of its Dirichlet data.
pub trait ExactSolution: Send + Sync {
    fn n_components(&self) -> usize;
    fn spatial_dim(&self) -> usize;
    fn eval(&self, x: &[f64], t: f64, out: &mut [f64]);
    fn eval_dt(&self, x: &[f64], t: f64, out: &mut [f64]);
}

type Forcing = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// `y' = A y + b(t)` for a user-supplied sparse `A` and forcing `b`.
pub struct LinearSystem {
    a: CsrMatrix,
    forcing: Option<Box<Forcing>>,
}

impl LinearSystem {
    pub fn homogeneous(a: CsrMatrix) -> Self {
        assert!(a.is_square(), "system matrix must be square");
        Self { a, forcing: None }
    }

    pub fn with_forcing(a: CsrMatrix, forcing: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        assert!(a.is_square(), "system matrix must be square");
        Self {
            a,
            forcing: Some(Box::new(forcing)),
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }
}

impl SemidiscreteSystem for LinearSystem {
    fn n_dof(&self) -> usize {
        self.a.n_rows()
    }

    fn eval_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.a.mul_vec_into(y, out);
        if let Some(b) = &self.forcing {
            for (o, bi) in out.iter_mut().zip(b(t)) {
                *o += bi;
            }
        }
    }

    fn jacobian(&self, _t: f64, _y: &[f64]) -> Cow<'_, CsrMatrix> {
        Cow::Borrowed(&self.a)
    }

    fn linear_operator(&self) -> Option<&CsrMatrix> {
        Some(&self.a)
    }
}

/// A benchmark: semidiscrete system on interior unknowns, its exact
/// solution, and the lifting that connects the two.
#[derive(Clone)]
pub struct Benchmark {
    pub name: String,
    pub grid: Grid,
    pub system: Arc<dyn SemidiscreteSystem>,
    pub exact: Arc<dyn ExactSolution>,
    pub lifting: Lifting,
}

impl Benchmark {
    /// Interior unknowns of the exact solution at time `t`.
    pub fn exact_interior(&self, t: f64) -> Vec<f64> {
        let full = sample_on_grid(&self.grid, self.exact.as_ref(), t);
        self.lifting
            .split(&full, t)
            .expect("lifting and exact solution share the grid")
    }

    pub fn initial_condition(&self) -> Vec<f64> {
        self.exact_interior(0.0)
    }

    /// Exact time derivative of the interior unknowns, `u_t - l_t`.
    pub fn exact_interior_dt(&self, t: f64) -> Vec<f64> {
        let k = self.exact.n_components();
        let nn = self.grid.n_nodes();
        let mut full = vec![0.0; k * nn];
        let mut vals = vec![0.0; k];
        for p in 0..nn {
            let x = self.grid.coords(p);
            self.exact.eval_dt(&x[..self.grid.dim()], t, &mut vals);
            for c in 0..k {
                full[c * nn + p] = vals[c];
            }
        }
        let lift_dt = self.lifting.field_dt(t);
        let diff: Vec<f64> = full.iter().zip(&lift_dt).map(|(a, b)| a - b).collect();
        self.lifting.restrict(&diff)
    }
}

impl std::fmt::Debug for Benchmark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Benchmark")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("n_dof", &self.system.n_dof())
            .finish()
    }
}
