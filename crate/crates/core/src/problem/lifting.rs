//! Dirichlet lifting.
//!
//! The full-grid field is written as `u = w + l`, where `w` vanishes on the
//! boundary and `l` matches the Dirichlet data there. `l` is the transfinite
//! (Boolean-sum) multilinear interpolant of the boundary values: in 2D this
//! is the bilinearly blended Coons patch, in 3D its trilinear analogue. Every
//! point the interpolant needs lies on a boundary grid node, so building `l`
//! only evaluates the data on the boundary.

use std::sync::Arc;

use super::{ExactSolution, Grid, ProblemError, Result};

#[derive(Clone)]
pub struct Lifting {
    grid: Grid,
    data: Arc<dyn ExactSolution>,
    boundary_nodes: Vec<usize>,
    /// Per interior node: (boundary node, signed weight) pairs of the interpolant.
    stencils: Vec<Vec<(usize, f64)>>,
}

impl std::fmt::Debug for Lifting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lifting")
            .field("grid", &self.grid)
            .field("n_components", &self.n_components())
            .finish()
    }
}

impl Lifting {
    pub fn new(grid: Grid, data: Arc<dyn ExactSolution>) -> Result<Self> {
        if data.spatial_dim() != grid.dim() {
            return Err(ProblemError::InvalidParameter(format!(
                "boundary data is {}-dimensional but the grid is {}-dimensional",
                data.spatial_dim(),
                grid.dim()
            )));
        }
        let boundary_nodes: Vec<usize> = (0..grid.n_nodes()).filter(|&p| grid.is_boundary(p)).collect();
        let stencils = grid
            .interior_nodes()
            .iter()
            .map(|&p| blend_stencil(&grid, p))
            .collect();
        Ok(Self {
            grid,
            data,
            boundary_nodes,
            stencils,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.data.n_components()
    }

    /// Length of an interior (unknown) vector.
    pub fn interior_len(&self) -> usize {
        self.n_components() * self.grid.n_interior()
    }

    /// Length of a full-grid vector.
    pub fn full_len(&self) -> usize {
        self.n_components() * self.grid.n_nodes()
    }

    fn build(&self, t: f64, derivative: bool) -> Vec<f64> {
        let k = self.n_components();
        let nn = self.grid.n_nodes();
        let mut field = vec![0.0; k * nn];
        let mut vals = vec![0.0; k];
        for &p in &self.boundary_nodes {
            let x = self.grid.coords(p);
            if derivative {
                self.data.eval_dt(&x[..self.grid.dim()], t, &mut vals);
            } else {
                self.data.eval(&x[..self.grid.dim()], t, &mut vals);
            }
            for c in 0..k {
                field[c * nn + p] = vals[c];
            }
        }
        for (&p, stencil) in self.grid.interior_nodes().iter().zip(&self.stencils) {
            for c in 0..k {
                let base = c * nn;
                field[base + p] = stencil.iter().map(|&(q, w)| w * field[base + q]).sum();
            }
        }
        field
    }

    /// Lifting field `l(., t)` on the full grid, component-major.
    pub fn field(&self, t: f64) -> Vec<f64> {
        self.build(t, false)
    }

    /// Time derivative of the lifting field.
    pub fn field_dt(&self, t: f64) -> Vec<f64> {
        self.build(t, true)
    }

    /// Restriction of a full-grid vector to interior nodes, component-major.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let nn = self.grid.n_nodes();
        let mut out = Vec::with_capacity(self.interior_len());
        for c in 0..self.n_components() {
            out.extend(self.grid.interior_nodes().iter().map(|&p| full[c * nn + p]));
        }
        out
    }

    /// Interior unknowns `w = u - l` of a full-grid field.
    pub fn split(&self, full: &[f64], t: f64) -> Result<Vec<f64>> {
        if full.len() != self.full_len() {
            return Err(ProblemError::ShapeMismatch {
                expected: self.full_len(),
                found: full.len(),
            });
        }
        let lift = self.field(t);
        let diff: Vec<f64> = full.iter().zip(&lift).map(|(u, l)| u - l).collect();
        Ok(self.restrict(&diff))
    }

    /// Full-grid field `u = w + l`; boundary nodes carry the data exactly.
    pub fn join(&self, interior: &[f64], t: f64) -> Result<Vec<f64>> {
        if interior.len() != self.interior_len() {
            return Err(ProblemError::ShapeMismatch {
                expected: self.interior_len(),
                found: interior.len(),
            });
        }
        let mut full = self.field(t);
        self.add_interior(interior, &mut full);
        Ok(full)
    }

    /// `full += ext(interior)` where `ext` zero-pads boundary nodes.
    pub fn add_interior(&self, interior: &[f64], full: &mut [f64]) {
        let nn = self.grid.n_nodes();
        let ni = self.grid.n_interior();
        for c in 0..self.n_components() {
            for (k, &p) in self.grid.interior_nodes().iter().enumerate() {
                full[c * nn + p] += interior[c * ni + k];
            }
        }
    }

    /// Samples `data` on every grid node (component-major).
    pub fn sample(&self, t: f64) -> Vec<f64> {
        sample_on_grid(&self.grid, self.data.as_ref(), t)
    }
}

/// Evaluates a field on every grid node, component-major.
pub fn sample_on_grid(grid: &Grid, field: &dyn ExactSolution, t: f64) -> Vec<f64> {
    let k = field.n_components();
    let nn = grid.n_nodes();
    let mut out = vec![0.0; k * nn];
    let mut vals = vec![0.0; k];
    for p in 0..nn {
        let x = grid.coords(p);
        field.eval(&x[..grid.dim()], t, &mut vals);
        for c in 0..k {
            out[c * nn + p] = vals[c];
        }
    }
    out
}

/// Boolean-sum interpolation weights `l = (I - prod_k (I - P_k)) g` at an
/// interior node, where `P_k` interpolates linearly between the two faces
/// orthogonal to axis `k`.
fn blend_stencil(grid: &Grid, node: usize) -> Vec<(usize, f64)> {
    let d = grid.dim();
    let last = grid.n_per_dim() - 1;
    let idx = grid.multi_index(node);
    let x = grid.coords(node);
    let mut out = Vec::new();
    for subset in 1u32..(1 << d) {
        let axes: Vec<usize> = (0..d).filter(|k| subset & (1 << k) != 0).collect();
        let sign = if axes.len() % 2 == 1 { 1.0 } else { -1.0 };
        for ends in 0u32..(1 << axes.len()) {
            let mut target = idx;
            let mut weight = sign;
            for (bit, &axis) in axes.iter().enumerate() {
                let s = x[axis] / grid.length();
                if ends & (1 << bit) != 0 {
                    target[axis] = last;
                    weight *= s;
                } else {
                    target[axis] = 0;
                    weight *= 1.0 - s;
                }
            }
            if weight != 0.0 {
                out.push((grid.node(&target), weight));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(f64, usize);

    impl ExactSolution for Constant {
        fn n_components(&self) -> usize {
            1
        }
        fn spatial_dim(&self) -> usize {
            self.1
        }
        fn eval(&self, _x: &[f64], _t: f64, out: &mut [f64]) {
            out[0] = self.0;
        }
        fn eval_dt(&self, _x: &[f64], _t: f64, out: &mut [f64]) {
            out[0] = 0.0;
        }
    }

    /// Multilinear data is reproduced exactly by the blended interpolant.
    struct Bilinear;

    impl ExactSolution for Bilinear {
        fn n_components(&self) -> usize {
            1
        }
        fn spatial_dim(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64], t: f64, out: &mut [f64]) {
            out[0] = 1.0 + 2.0 * x[0] - x[1] + 3.0 * x[0] * x[1] + t;
        }
        fn eval_dt(&self, _x: &[f64], _t: f64, out: &mut [f64]) {
            out[0] = 1.0;
        }
    }

    #[test]
    fn homogeneous_data_gives_zero_lifting() {
        let grid = Grid::unit(2, 6).unwrap();
        let lift = Lifting::new(grid, Arc::new(Constant(0.0, 2))).unwrap();
        assert!(lift.field(0.3).iter().all(|&v| v == 0.0));
        let w: Vec<f64> = (0..lift.interior_len()).map(|i| i as f64).collect();
        let full = lift.join(&w, 0.3).unwrap();
        assert_eq!(lift.restrict(&full), w);
    }

    #[test]
    fn constant_data_on_boundary() {
        let grid = Grid::unit(3, 5).unwrap();
        let lift = Lifting::new(grid.clone(), Arc::new(Constant(1.0, 3))).unwrap();
        let full = lift.join(&vec![0.0; lift.interior_len()], 0.0).unwrap();
        for p in 0..grid.n_nodes() {
            if grid.is_boundary(p) {
                assert_eq!(full[p], 1.0);
            }
        }
        // The blend of a constant is that constant everywhere.
        assert!(full.iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn bilinear_data_is_interpolated_exactly() {
        let grid = Grid::unit(2, 7).unwrap();
        let lift = Lifting::new(grid.clone(), Arc::new(Bilinear)).unwrap();
        let field = lift.field(0.5);
        let exact = lift.sample(0.5);
        for (a, b) in field.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(lift.field_dt(0.5).iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn shape_mismatch() {
        let grid = Grid::unit(2, 4).unwrap();
        let lift = Lifting::new(grid, Arc::new(Constant(0.0, 2))).unwrap();
        assert!(matches!(lift.join(&[1.0], 0.0), Err(ProblemError::ShapeMismatch { .. })));
        assert!(matches!(lift.split(&[1.0], 0.0), Err(ProblemError::ShapeMismatch { .. })));
    }
}
