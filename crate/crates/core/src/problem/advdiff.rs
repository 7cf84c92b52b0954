//! Linear advection-diffusion `u_t + c . grad u - mu Lap u = f` on `[0,1]^d`
//! with a manufactured travelling Gaussian.
//!
//! Exact solution, with `r = x - x0 - c t` and `s = sigma^2 + mu t`:
//!
//! ```text
//! u(x, t) = U exp(-|r|^2 / s)
//! ```
//!
//! Differentiating (`dr/dt = -c`, `ds/dt = mu`, `grad u = -2 r u / s`):
//!
//! ```text
//! u_t       = u (2 c.r / s + mu |r|^2 / s^2)
//! c . grad u = -2 u c.r / s
//! Lap u     = u (4 |r|^2 / s^2 - 2 d / s)
//! ```
//!
//! so the forcing that makes `u` exact is
//!
//! ```text
//! f = u_t + c . grad u - mu Lap u = mu u (2 d / s - 3 |r|^2 / s^2).
//! ```
//!
//! The semidiscrete operator is `A = mu Lap_h - c . grad_h` with the
//! `(2d+1)`-point Laplacian and centered first differences.

use std::borrow::Cow;
use std::sync::{Arc, Mutex};

use super::{Benchmark, ExactSolution, Grid, Lifting, ProblemError, Result, SemidiscreteSystem};
use crate::linalg::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, PartialEq)]
pub struct AdvDiffParams {
    pub mu: f64,
    pub velocity: Vec<f64>,
    pub sigma: f64,
    pub amplitude: f64,
    pub center: Vec<f64>,
}

impl AdvDiffParams {
    /// mu = 0.005, c = (0.5, 0.25), sigma = 0.25, U = 0.25, x0 = (0.25, 0.25).
    pub fn benchmark_2d() -> Self {
        Self {
            mu: 0.005,
            velocity: vec![0.5, 0.25],
            sigma: 0.25,
            amplitude: 0.25,
            center: vec![0.25, 0.25],
        }
    }

    /// mu = 0.01, c = (0.5, 0.25, 0.25), sigma = 0.25, U = 0.25, x0 = (0.25, 0.25, 0.25).
    pub fn benchmark_3d() -> Self {
        Self {
            mu: 0.01,
            velocity: vec![0.5, 0.25, 0.25],
            sigma: 0.25,
            amplitude: 0.25,
            center: vec![0.25, 0.25, 0.25],
        }
    }

    pub fn benchmark(dim: usize) -> Self {
        if dim == 3 {
            Self::benchmark_3d()
        } else {
            Self::benchmark_2d()
        }
    }

    pub fn dim(&self) -> usize {
        self.velocity.len()
    }
}

/// The travelling Gaussian blob.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBlob {
    pub params: AdvDiffParams,
}

impl GaussianBlob {
    pub fn new(params: AdvDiffParams) -> Self {
        Self { params }
    }

    /// Returns `(u, c.r, |r|^2, s)`.
    fn parts(&self, x: &[f64], t: f64) -> (f64, f64, f64, f64) {
        let p = &self.params;
        let s = p.sigma * p.sigma + p.mu * t;
        let mut r2 = 0.0;
        let mut cr = 0.0;
        for k in 0..p.dim() {
            let r = x[k] - p.center[k] - p.velocity[k] * t;
            r2 += r * r;
            cr += p.velocity[k] * r;
        }
        (p.amplitude * (-r2 / s).exp(), cr, r2, s)
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        self.parts(x, t).0
    }

    /// Manufactured forcing `mu u (2 d / s - 3 |r|^2 / s^2)`.
    pub fn forcing(&self, x: &[f64], t: f64) -> f64 {
        let (u, _, r2, s) = self.parts(x, t);
        let d = self.params.dim() as f64;
        self.params.mu * u * (2.0 * d / s - 3.0 * r2 / (s * s))
    }
}

/// Forcing of the advection-diffusion benchmark at `(x, t)`.
pub fn advdiff_forcing(params: &AdvDiffParams, x: &[f64], t: f64) -> f64 {
    GaussianBlob::new(params.clone()).forcing(x, t)
}

impl ExactSolution for GaussianBlob {
    fn n_components(&self) -> usize {
        1
    }

    fn spatial_dim(&self) -> usize {
        self.params.dim()
    }

    fn eval(&self, x: &[f64], t: f64, out: &mut [f64]) {
        out[0] = self.value(x, t);
    }

    fn eval_dt(&self, x: &[f64], t: f64, out: &mut [f64]) {
        let (u, cr, r2, s) = self.parts(x, t);
        out[0] = u * (2.0 * cr / s + self.params.mu * r2 / (s * s));
    }
}

/// `y' = A y + b(t)` on interior unknowns.
pub struct AdvDiffSystem {
    grid: Grid,
    blob: GaussianBlob,
    lifting: Lifting,
    /// Interior rows, all grid columns.
    a_full: CsrMatrix,
    a: CsrMatrix,
    cache: Mutex<Option<(u64, Arc<Vec<f64>>)>>,
}

impl AdvDiffSystem {
    pub fn new(grid: Grid, params: AdvDiffParams) -> Result<Self> {
        if params.dim() != grid.dim() || params.center.len() != grid.dim() {
            return Err(ProblemError::InvalidParameter(format!(
                "parameters are {}-dimensional but the grid is {}-dimensional",
                params.dim(),
                grid.dim()
            )));
        }
        if !(params.mu > 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "diffusion coefficient must be positive, got {}",
                params.mu
            )));
        }
        let blob = GaussianBlob::new(params);
        let lifting = Lifting::new(grid.clone(), Arc::new(blob.clone()))?;
        let a_full = assemble_rows(&grid, &blob.params);
        let a = a_full.select_columns(grid.interior_nodes());
        Ok(Self {
            grid,
            blob,
            lifting,
            a_full,
            a,
            cache: Mutex::new(None),
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn blob(&self) -> &GaussianBlob {
        &self.blob
    }

    pub fn lifting(&self) -> &Lifting {
        &self.lifting
    }

    /// `b(t)`: forcing, boundary coupling through the lifting, and `-l_t`.
    pub fn affine_term(&self, t: f64) -> Arc<Vec<f64>> {
        let key = t.to_bits();
        if let Some((k, b)) = self.cache.lock().unwrap().as_ref() {
            if *k == key {
                return Arc::clone(b);
            }
        }
        let lift = self.lifting.field(t);
        let lift_dt = self.lifting.field_dt(t);
        let mut b = self.a_full.mul_vec(&lift);
        for (k, &p) in self.grid.interior_nodes().iter().enumerate() {
            let x = self.grid.coords(p);
            b[k] += self.blob.forcing(&x[..self.grid.dim()], t) - lift_dt[p];
        }
        let b = Arc::new(b);
        *self.cache.lock().unwrap() = Some((key, Arc::clone(&b)));
        b
    }
}

impl SemidiscreteSystem for AdvDiffSystem {
    fn n_dof(&self) -> usize {
        self.grid.n_interior()
    }

    fn eval_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        self.a.mul_vec_into(y, out);
        let b = self.affine_term(t);
        for (o, bi) in out.iter_mut().zip(b.iter()) {
            *o += bi;
        }
    }

    fn jacobian(&self, _t: f64, _y: &[f64]) -> Cow<'_, CsrMatrix> {
        Cow::Borrowed(&self.a)
    }

    fn linear_operator(&self) -> Option<&CsrMatrix> {
        Some(&self.a)
    }
}

/// Stencil rows `mu Lap_h - c . grad_h` for every interior node, columns over
/// the full grid.
fn assemble_rows(grid: &Grid, params: &AdvDiffParams) -> CsrMatrix {
    let d = grid.dim();
    let h = grid.h();
    let diff = params.mu / (h * h);
    let mut b = TripletBuilder::with_capacity(grid.n_interior(), grid.n_nodes(), grid.n_interior() * (2 * d + 1));
    for (row, &p) in grid.interior_nodes().iter().enumerate() {
        b.push(row, p, -2.0 * d as f64 * diff);
        for axis in 0..d {
            let adv = params.velocity[axis] / (2.0 * h);
            b.push(row, grid.neighbour(p, axis, 1), diff - adv);
            b.push(row, grid.neighbour(p, axis, -1), diff + adv);
        }
    }
    b.build()
}

/// Advection-diffusion benchmark on `grid`.
pub fn build_advdiff(grid: &Grid, params: AdvDiffParams) -> Result<Benchmark> {
    let system = AdvDiffSystem::new(grid.clone(), params)?;
    let exact: Arc<dyn ExactSolution> = Arc::new(system.blob.clone());
    let lifting = system.lifting.clone();
    Ok(Benchmark {
        name: format!("advdiff{}d", grid.dim()),
        grid: grid.clone(),
        system: Arc::new(system),
        exact,
        lifting,
    })
}
