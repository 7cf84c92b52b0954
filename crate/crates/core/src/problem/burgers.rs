//! 2D viscous Burgers' equation `u_t + (u . grad) u - nu Lap u = 0` on
//! `[0,1]^2` with two components, centered convection and the 5-point
//! Laplacian. Unknowns are component-major: all interior `u_1`, then all
//! interior `u_2`.

use std::borrow::Cow;
use std::sync::Arc;

use super::{Benchmark, ExactSolution, Grid, Lifting, ProblemError, Result, SemidiscreteSystem};
use crate::linalg::{CsrMatrix, TripletBuilder};

/// Travelling-front exact solution
/// `u_{1,2} = 3/4 -/+ 1/4 (1 + exp((-4 x_1 + 4 x_2 - t) / (32 nu)))^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersExact {
    pub nu: f64,
}

impl BurgersExact {
    fn front(&self, x: &[f64], t: f64) -> f64 {
        let z = (-4.0 * x[0] + 4.0 * x[1] - t) / (32.0 * self.nu);
        1.0 / (1.0 + z.exp())
    }
}

impl ExactSolution for BurgersExact {
    fn n_components(&self) -> usize {
        2
    }

    fn spatial_dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64], t: f64, out: &mut [f64]) {
        let phi = self.front(x, t);
        out[0] = 0.75 - 0.25 * phi;
        out[1] = 0.75 + 0.25 * phi;
    }

    fn eval_dt(&self, x: &[f64], t: f64, out: &mut [f64]) {
        let phi = self.front(x, t);
        // d(phi)/dz = -phi (1 - phi), dz/dt = -1 / (32 nu).
        let dphi = phi * (1.0 - phi) / (32.0 * self.nu);
        out[0] = -0.25 * dphi;
        out[1] = 0.25 * dphi;
    }
}

pub struct BurgersSystem {
    grid: Grid,
    nu: f64,
    lifting: Lifting,
}

impl BurgersSystem {
    pub fn new(grid: Grid, nu: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(ProblemError::UnsupportedDimension(grid.dim()));
        }
        if !(nu > 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "viscosity must be positive, got {nu}"
            )));
        }
        let lifting = Lifting::new(grid.clone(), Arc::new(BurgersExact { nu }))?;
        Ok(Self { grid, nu, lifting })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lifting(&self) -> &Lifting {
        &self.lifting
    }

    /// Full-grid fields `(u_1, u_2)` for interior unknowns `y` at time `t`.
    fn full_fields(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let mut full = self.lifting.field(t);
        self.lifting.add_interior(y, &mut full);
        full
    }
}

/// Centered first differences and Laplacian of a full-grid field at node `p`.
#[inline]
fn derivatives(grid: &Grid, u: &[f64], p: usize, h: f64) -> (f64, f64, f64) {
    let e = u[grid.neighbour(p, 0, 1)];
    let w = u[grid.neighbour(p, 0, -1)];
    let n = u[grid.neighbour(p, 1, 1)];
    let s = u[grid.neighbour(p, 1, -1)];
    let dx = (e - w) / (2.0 * h);
    let dy = (n - s) / (2.0 * h);
    let lap = (e + w + n + s - 4.0 * u[p]) / (h * h);
    (dx, dy, lap)
}

impl SemidiscreteSystem for BurgersSystem {
    fn n_dof(&self) -> usize {
        2 * self.grid.n_interior()
    }

    fn n_components(&self) -> usize {
        2
    }

    fn eval_f(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let nn = self.grid.n_nodes();
        let ni = self.grid.n_interior();
        let h = self.grid.h();
        let full = self.full_fields(t, y);
        let lift_dt = self.lifting.field_dt(t);
        let (u1, u2) = full.split_at(nn);
        for (k, &p) in self.grid.interior_nodes().iter().enumerate() {
            let (u1x, u1y, lap1) = derivatives(&self.grid, u1, p, h);
            let (u2x, u2y, lap2) = derivatives(&self.grid, u2, p, h);
            out[k] = -(u1[p] * u1x + u2[p] * u1y) + self.nu * lap1 - lift_dt[p];
            out[ni + k] = -(u1[p] * u2x + u2[p] * u2y) + self.nu * lap2 - lift_dt[nn + p];
        }
    }

    fn jacobian(&self, t: f64, y: &[f64]) -> Cow<'_, CsrMatrix> {
        let nn = self.grid.n_nodes();
        let ni = self.grid.n_interior();
        let h = self.grid.h();
        let full = self.full_fields(t, y);
        let (u1, u2) = full.split_at(nn);
        let mut b = TripletBuilder::with_capacity(2 * ni, 2 * ni, 2 * ni * 6);
        let diff = self.nu / (h * h);
        for (k, &p) in self.grid.interior_nodes().iter().enumerate() {
            let (u1x, u1y, _) = derivatives(&self.grid, u1, p, h);
            let (u2x, u2y, _) = derivatives(&self.grid, u2, p, h);
            // Diagonal blocks share the transport stencil -(u1 d/dx + u2 d/dy) + nu Lap.
            b.push(k, k, -u1x - 4.0 * diff);
            b.push(ni + k, ni + k, -u2y - 4.0 * diff);
            b.push(k, ni + k, -u1y);
            b.push(ni + k, k, -u2x);
            let neighbours = [
                (0, 1, -u1[p] / (2.0 * h)),
                (0, -1, u1[p] / (2.0 * h)),
                (1, 1, -u2[p] / (2.0 * h)),
                (1, -1, u2[p] / (2.0 * h)),
            ];
            for (axis, delta, adv) in neighbours {
                let q = self.grid.neighbour(p, axis, delta);
                if let Some(j) = self.grid.interior_index(q) {
                    b.push(k, j, diff + adv);
                    b.push(ni + k, ni + j, diff + adv);
                }
            }
        }
        Cow::Owned(b.build())
    }
}

/// Burgers benchmark on a 2D grid.
pub fn build_burgers(grid: &Grid, nu: f64) -> Result<Benchmark> {
    let system = BurgersSystem::new(grid.clone(), nu)?;
    let lifting = system.lifting.clone();
    Ok(Benchmark {
        name: "burgers2d".into(),
        grid: grid.clone(),
        system: Arc::new(system),
        exact: Arc::new(BurgersExact { nu }),
        lifting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector::norm2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_on_diagonal_at_start() {
        let ex = BurgersExact { nu: 0.01 };
        let mut out = [0.0; 2];
        ex.eval(&[0.3, 0.3], 0.0, &mut out);
        assert_eq!(out, [0.625, 0.875]);
    }

    #[test]
    fn jacobian_matches_directional_differences() {
        let grid = Grid::unit(2, 11).unwrap();
        let sys = BurgersSystem::new(grid, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = sys.n_dof();
        for _ in 0..5 {
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t = rng.gen_range(0.0..1.0);
            let eps = 1e-6;
            let yp: Vec<f64> = y.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
            let ym: Vec<f64> = y.iter().zip(&v).map(|(a, b)| a - eps * b).collect();
            let fp = sys.eval(t, &yp);
            let fm = sys.eval(t, &ym);
            let jv = sys.jacobian(t, &y).mul_vec(&v);
            let diff: Vec<f64> = (0..n).map(|i| jv[i] - (fp[i] - fm[i]) / (2.0 * eps)).collect();
            assert!(norm2(&diff) <= 1e-6 * norm2(&v), "{}", norm2(&diff));
        }
    }

    #[test]
    fn eval_dt_matches_finite_difference() {
        let ex = BurgersExact { nu: 0.01 };
        let (x, t, eps) = ([0.4, 0.45], 0.2, 1e-7);
        let (mut a, mut b, mut d) = ([0.0; 2], [0.0; 2], [0.0; 2]);
        ex.eval(&x, t + eps, &mut a);
        ex.eval(&x, t - eps, &mut b);
        ex.eval_dt(&x, t, &mut d);
        for c in 0..2 {
            assert!((d[c] - (a[c] - b[c]) / (2.0 * eps)).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_three_dimensional_grid() {
        assert!(BurgersSystem::new(Grid::unit(3, 5).unwrap(), 0.01).is_err());
    }
}
