use super::vector::{axpy, dot, norm2};
use super::{LinalgError, Result};

/// Tall matrix with orthonormal columns, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    n_rows: usize,
    cols: Vec<Vec<f64>>,
}

impl OrthoBasis {
    pub fn empty(n_rows: usize) -> Self {
        Self {
            n_rows,
            cols: Vec::new(),
        }
    }

    /// Wraps columns that the caller guarantees to be orthonormal.
    pub fn from_columns_unchecked(n_rows: usize, cols: Vec<Vec<f64>>) -> Self {
        debug_assert!(cols.iter().all(|c| c.len() == n_rows));
        Self { n_rows, cols }
    }

    /// Canonical basis vector `e_index`.
    pub fn unit(n_rows: usize, index: usize) -> Self {
        let mut e = vec![0.0; n_rows];
        e[index] = 1.0;
        Self {
            n_rows,
            cols: vec![e],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }

    pub(crate) fn columns_mut(&mut self) -> &mut Vec<Vec<f64>> {
        &mut self.cols
    }

    /// `V^T u`
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.cols.iter().map(|c| dot(c, u)).collect()
    }

    /// `V c`
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.cols.len());
        let mut out = vec![0.0; self.n_rows];
        for (c, col) in coeffs.iter().zip(&self.cols) {
            axpy(*c, col, &mut out);
        }
        out
    }

    /// `||V^T V - I||_F`
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.cols.len();
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = dot(&self.cols[i], &self.cols[j]) - target;
                acc += d * d;
            }
        }
        acc.sqrt()
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.cols
    }
}

/// Component of `u` orthogonal to `span(Q)` and its relative size.
///
/// Returns `(r, ||r|| / ||u||)` with `r = u - Q Q^T u`; the ratio is 0 for
/// `u = 0`.
pub fn orth_residual(q: &OrthoBasis, u: &[f64]) -> (Vec<f64>, f64) {
    assert_eq!(u.len(), q.n_rows, "vector length does not match basis rows");
    let mut r = u.to_vec();
    for col in &q.cols {
        let c = dot(col, &r);
        axpy(-c, col, &mut r);
    }
    let unorm = norm2(u);
    let ratio = if unorm > 0.0 { norm2(&r) / unorm } else { 0.0 };
    (r, ratio)
}

/// Appends `r / ||r||` to the basis, reorthogonalizing once when `r` is not
/// numerically orthogonal to the existing columns.
pub fn gs_extend(q: &mut OrthoBasis, r: &[f64]) -> Result<()> {
    assert_eq!(r.len(), q.n_rows, "vector length does not match basis rows");
    let rnorm = norm2(r);
    if rnorm == 0.0 || !rnorm.is_finite() {
        return Err(LinalgError::ZeroVector);
    }
    let mut v: Vec<f64> = r.iter().map(|x| x / rnorm).collect();
    let overlaps = q.project(&v);
    if overlaps.iter().any(|c| c.abs() > 1e-13) {
        for (c, col) in overlaps.iter().zip(&q.cols) {
            axpy(-c, col, &mut v);
        }
        let vnorm = norm2(&v);
        if vnorm <= 1e-14 {
            return Err(LinalgError::ZeroVector);
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
    }
    q.cols.push(v);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn vector_in_span_has_zero_ratio() {
        let mut q = OrthoBasis::unit(3, 0);
        gs_extend(&mut q, &[0.0, 1.0, 0.0]).unwrap();
        let (_, ratio) = orth_residual(&q, &[2.0, -3.0, 0.0]);
        assert!(ratio < 1e-12);
    }

    #[test]
    fn orthogonal_vector_has_unit_ratio() {
        let q = OrthoBasis::unit(2, 0);
        let (r, ratio) = orth_residual(&q, &[0.0, 1.0]);
        assert_eq!(ratio, 1.0);
        assert_eq!(r, vec![0.0, 1.0]);
    }

    #[test]
    fn zero_vector_ratio_is_zero() {
        let q = OrthoBasis::unit(2, 0);
        assert_eq!(orth_residual(&q, &[0.0, 0.0]).1, 0.0);
    }

    #[test]
    fn extend_empty_basis() {
        let mut q = OrthoBasis::empty(2);
        gs_extend(&mut q, &[0.0, 2.0]).unwrap();
        assert_eq!(q.column(0), &[0.0, 1.0]);
    }

    #[test]
    fn extend_to_identity() {
        let mut q = OrthoBasis::unit(2, 0);
        gs_extend(&mut q, &[0.0, 1.0]).unwrap();
        assert_eq!(q.columns(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn zero_residual_is_rejected() {
        let mut q = OrthoBasis::empty(2);
        assert_eq!(gs_extend(&mut q, &[0.0, 0.0]), Err(LinalgError::ZeroVector));
    }

    #[test]
    fn thirty_extensions_stay_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200;
        let mut q = OrthoBasis::empty(n);
        for _ in 0..30 {
            let u = random_vec(&mut rng, n);
            let (r, _) = orth_residual(&q, &u);
            gs_extend(&mut q, &r).unwrap();
        }
        assert_eq!(q.n_cols(), 30);
        assert!(q.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn pythagoras_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 60;
        let mut q = OrthoBasis::empty(n);
        for _ in 0..8 {
            let (r, _) = orth_residual(&q, &random_vec(&mut rng, n));
            gs_extend(&mut q, &r).unwrap();
        }
        for _ in 0..20 {
            let u = random_vec(&mut rng, n);
            let (r, _) = orth_residual(&q, &u);
            let proj = q.project(&u);
            let lhs = dot(&u, &u);
            let rhs = dot(&proj, &proj) + dot(&r, &r);
            assert!((lhs - rhs).abs() <= 1e-10 * lhs);
        }
    }
}
