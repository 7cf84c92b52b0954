use super::{ProblemError, Result};

/// Uniform Cartesian grid on `[0, L]^d` with `n` nodes per direction.
///
/// Nodes are numbered lexicographically by `(i_1, ..., i_d)`, with `i_1`
/// varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
    interior_nodes: Vec<usize>,
    /// Node index -> interior index, `usize::MAX` on the boundary.
    interior_index: Vec<usize>,
}

impl Grid {
    pub fn new(dim: usize, n_per_dim: usize, length: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(ProblemError::UnsupportedDimension(dim));
        }
        if n_per_dim < 3 {
            return Err(ProblemError::GridTooCoarse(n_per_dim));
        }
        if !(length > 0.0) {
            return Err(ProblemError::InvalidParameter(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let mut grid = Self {
            dim,
            n: n_per_dim,
            length,
            interior_nodes: Vec::new(),
            interior_index: Vec::new(),
        };
        let total = grid.n_nodes();
        let mut interior_index = vec![usize::MAX; total];
        let mut interior_nodes = Vec::with_capacity((n_per_dim - 2).pow(dim as u32));
        for node in 0..total {
            if !grid.is_boundary(node) {
                interior_index[node] = interior_nodes.len();
                interior_nodes.push(node);
            }
        }
        grid.interior_nodes = interior_nodes;
        grid.interior_index = interior_index;
        Ok(grid)
    }

    /// Unit-length grid, the setting of every benchmark here.
    pub fn unit(dim: usize, n_per_dim: usize) -> Result<Self> {
        Self::new(dim, n_per_dim, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_dim(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.length / (self.n - 1) as f64
    }

    pub fn n_nodes(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn n_interior(&self) -> usize {
        self.interior_nodes.len()
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    /// Interior index of a node, `None` for boundary nodes.
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        let k = self.interior_index[node];
        (k != usize::MAX).then_some(k)
    }

    pub fn multi_index(&self, node: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rest = node;
        for k in (0..self.dim).rev() {
            idx[k] = rest % self.n;
            rest /= self.n;
        }
        idx
    }

    pub fn node(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    /// Node index of the neighbour at offset `delta` along axis `axis`.
    pub fn neighbour(&self, node: usize, axis: usize, delta: isize) -> usize {
        let stride = self.n.pow((self.dim - 1 - axis) as u32) as isize;
        (node as isize + delta * stride) as usize
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            self.length
        } else {
            i as f64 * self.h()
        }
    }

    pub fn coords(&self, node: usize) -> [f64; 3] {
        let idx = self.multi_index(node);
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = self.coordinate(idx[k]);
        }
        x
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let idx = self.multi_index(node);
        idx[..self.dim].iter().any(|&i| i == 0 || i == self.n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_matches_length() {
        for n in [3, 11, 51, 101] {
            let g = Grid::unit(2, n).unwrap();
            assert!((g.h() * (n - 1) as f64 - 1.0).abs() < 1e-14);
            assert_eq!(g.coords(g.n_nodes() - 1)[..2], [1.0, 1.0]);
        }
    }

    #[test]
    fn counts() {
        let g = Grid::unit(3, 5).unwrap();
        assert_eq!(g.n_nodes(), 125);
        assert_eq!(g.n_interior(), 27);
    }

    #[test]
    fn index_round_trip_and_neighbours() {
        let g = Grid::unit(3, 4).unwrap();
        for node in 0..g.n_nodes() {
            assert_eq!(g.node(&g.multi_index(node)), node);
        }
        let p = g.node(&[1, 2, 1]);
        assert_eq!(g.multi_index(g.neighbour(p, 0, 1))[..3], [2, 2, 1]);
        assert_eq!(g.multi_index(g.neighbour(p, 2, -1))[..3], [1, 2, 0]);
    }

    #[test]
    fn rejects_coarse_grids() {
        assert_eq!(Grid::unit(2, 2), Err(ProblemError::GridTooCoarse(2)));
        assert_eq!(Grid::unit(4, 10), Err(ProblemError::UnsupportedDimension(4)));
    }
}
