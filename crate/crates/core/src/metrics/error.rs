//! Grid-weighted relative errors.
//!
//! With `e_{k,n}` the error of component `k` at step `n` over all grid
//! nodes (boundary included) and `||v||^2 = h^d sum_i v_i^2`:
//!
//! ```text
//! e_{r,n} = ( sum_k ||e_{k,n}||^2 / ||u_ex,k(t_n)||^2 )^{1/2}
//! e_bar   = ( sum_k (sum_n dt ||e_{k,n}||^2) / (sum_n dt ||u_ex,k(t_n)||^2) )^{1/2}
//! ```
//!
//! with `n = 1..N_t` in the aggregate. The `h^d` and `dt` weights cancel.

use super::{MetricsError, Result};
use crate::problem::{sample_on_grid, ExactSolution, Lifting};

/// Weighted squared norms of the error and of the exact field, per component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentNorms {
    pub err_sq: Vec<f64>,
    pub exact_sq: Vec<f64>,
}

impl ComponentNorms {
    pub fn n_components(&self) -> usize {
        self.err_sq.len()
    }

    /// `e_{r,n}` for this time level.
    pub fn relative_error(&self) -> Result<f64> {
        let mut sum = 0.0;
        for (k, (e, u)) in self.err_sq.iter().zip(&self.exact_sq).enumerate() {
            if *u == 0.0 {
                return Err(MetricsError::ZeroExactNorm { component: k });
            }
            sum += e / u;
        }
        Ok(sum.sqrt())
    }
}

/// Squared norms of `approx - exact` and `exact`, both full-grid and
/// component-major, each scaled by `weight`.
pub fn component_norms(approx: &[f64], exact: &[f64], n_components: usize, weight: f64) -> Result<ComponentNorms> {
    if approx.len() != exact.len() {
        return Err(MetricsError::ShapeMismatch {
            expected: exact.len(),
            found: approx.len(),
        });
    }
    if n_components == 0 || exact.len() % n_components != 0 {
        return Err(MetricsError::Degenerate(format!(
            "{} values do not split into {n_components} components",
            exact.len()
        )));
    }
    let len = exact.len() / n_components;
    let mut out = ComponentNorms {
        err_sq: vec![0.0; n_components],
        exact_sq: vec![0.0; n_components],
    };
    for k in 0..n_components {
        let range = k * len..(k + 1) * len;
        for (a, u) in approx[range.clone()].iter().zip(&exact[range]) {
            out.err_sq[k] += (a - u).powi(2);
            out.exact_sq[k] += u * u;
        }
        out.err_sq[k] *= weight;
        out.exact_sq[k] *= weight;
    }
    Ok(out)
}

/// Weighted norms of the interior state `u` (lifted back to the full grid)
/// against `exact` at time `t`.
pub fn state_norms(u: &[f64], exact: &dyn ExactSolution, lifting: &Lifting, t: f64) -> Result<ComponentNorms> {
    let full = lifting.join(u, t).map_err(|_| MetricsError::ShapeMismatch {
        expected: lifting.interior_len(),
        found: u.len(),
    })?;
    let grid = lifting.grid();
    let reference = sample_on_grid(grid, exact, t);
    let weight = grid.h().powi(grid.dim() as i32);
    component_norms(&full, &reference, exact.n_components(), weight)
}

/// Relative error `e_{r,n}` of the interior state `u` at time `t`.
pub fn relative_error_space(u: &[f64], exact: &dyn ExactSolution, lifting: &Lifting, t: f64) -> Result<f64> {
    state_norms(u, exact, lifting, t)?.relative_error()
}

/// Aggregate error over time levels `1..=N_t` given their norms.
pub fn aggregate_error(steps: &[ComponentNorms], dt: f64) -> Result<f64> {
    let first = steps.first().ok_or(MetricsError::EmptySeries)?;
    let mut acc = ErrorAccumulator::new(first.n_components(), dt);
    for s in steps {
        acc.push(s)?;
    }
    acc.aggregate()
}

/// Per-step relative errors and the aggregate indicator of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorSeries {
    /// `e_{r,n}` for `n = 1..=N_t`.
    pub per_step: Vec<f64>,
    pub aggregate: f64,
}

impl ErrorSeries {
    pub fn final_step(&self) -> Option<f64> {
        self.per_step.last().copied()
    }
}

/// Streaming accumulator for [`ErrorSeries`].
#[derive(Debug, Clone)]
pub struct ErrorAccumulator {
    dt: f64,
    err_sum: Vec<f64>,
    exact_sum: Vec<f64>,
    per_step: Vec<f64>,
}

impl ErrorAccumulator {
    pub fn new(n_components: usize, dt: f64) -> Self {
        Self {
            dt,
            err_sum: vec![0.0; n_components],
            exact_sum: vec![0.0; n_components],
            per_step: Vec::new(),
        }
    }

    pub fn push(&mut self, norms: &ComponentNorms) -> Result<()> {
        if norms.n_components() != self.err_sum.len() {
            return Err(MetricsError::ShapeMismatch {
                expected: self.err_sum.len(),
                found: norms.n_components(),
            });
        }
        for k in 0..self.err_sum.len() {
            self.err_sum[k] += self.dt * norms.err_sq[k];
            self.exact_sum[k] += self.dt * norms.exact_sq[k];
        }
        self.per_step.push(norms.relative_error()?);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.per_step.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_step.is_empty()
    }

    pub fn aggregate(&self) -> Result<f64> {
        if self.per_step.is_empty() {
            return Err(MetricsError::EmptySeries);
        }
        let mut sum = 0.0;
        for (k, (e, u)) in self.err_sum.iter().zip(&self.exact_sum).enumerate() {
            if *u == 0.0 {
                return Err(MetricsError::ZeroExactNorm { component: k });
            }
            sum += e / u;
        }
        Ok(sum.sqrt())
    }

    pub fn finish(self) -> Result<ErrorSeries> {
        let aggregate = self.aggregate()?;
        Ok(ErrorSeries {
            per_step: self.per_step,
            aggregate,
        })
    }
}
