//! Thin QR factorization of a snapshot window with column insertion and
//! oldest-column deletion.
//!
//! `R` factors the raw snapshots (`Q R = [s_1 ... s_m]`). The acceptance test
//! for a new column works on column-normalized `R`, i.e. on the snapshots
//! divided by their norms, so it is insensitive to the solution magnitude.

use super::ortho::OrthoBasis;
use super::vector::{axpy, dot, norm2};
use super::DenseMatrix;

#[derive(Debug, Clone)]
pub struct QrFactor {
    q: OrthoBasis,
    r: DenseMatrix,
}

impl QrFactor {
    /// Norms at or below `1e-14 * sqrt(len)` are treated as identically
    /// zero and replaced by the first canonical vector.
    pub fn fallback_threshold(len: usize) -> f64 {
        1e-14 * (len as f64).sqrt()
    }

    pub fn init(v: &[f64]) -> Self {
        let n = v.len();
        assert!(n > 0, "cannot factor an empty vector");
        let norm = norm2(v);
        if norm > Self::fallback_threshold(n) {
            let q = v.iter().map(|x| x / norm).collect();
            Self {
                q: OrthoBasis::from_columns_unchecked(n, vec![q]),
                r: DenseMatrix::from_diagonal(&[norm]),
            }
        } else {
            // Placeholder column: e_1 with a zero coefficient still
            // reproduces the zero snapshot.
            Self {
                q: OrthoBasis::unit(n, 0),
                r: DenseMatrix::from_diagonal(&[0.0]),
            }
        }
    }

    pub fn q(&self) -> &OrthoBasis {
        &self.q
    }

    pub fn r(&self) -> &DenseMatrix {
        &self.r
    }

    pub fn n_cols(&self) -> usize {
        self.q.n_cols()
    }

    pub fn n_rows(&self) -> usize {
        self.q.n_rows()
    }

    /// `|R_jj| / ||R[:, j]||`, with zero (placeholder) columns counted as 1.
    fn normalized_diagonal(&self, j: usize) -> f64 {
        let col_norm = (0..=j).map(|i| self.r[(i, j)].powi(2)).sum::<f64>().sqrt();
        if col_norm == 0.0 {
            1.0
        } else {
            self.r[(j, j)].abs() / col_norm
        }
    }

    /// Reciprocal condition estimate `min_j d_j / max_j d_j` of the
    /// column-normalized `R`.
    pub fn rcond(&self) -> f64 {
        let d: Vec<f64> = (0..self.n_cols()).map(|j| self.normalized_diagonal(j)).collect();
        rcond_of(&d)
    }

    /// Appends snapshot `v` unless the augmented factor would have a
    /// reciprocal condition estimate at or below `delta`. Returns whether the
    /// column was inserted; on `false` the factor is unchanged.
    pub fn append(&mut self, v: &[f64], delta: f64) -> bool {
        assert_eq!(v.len(), self.n_rows(), "snapshot length mismatch");
        let vnorm = norm2(v);
        if vnorm == 0.0 || !vnorm.is_finite() {
            return false;
        }
        let mut w = v.to_vec();
        let m = self.n_cols();
        let mut coeffs = vec![0.0; m];
        for _pass in 0..2 {
            for (c, col) in coeffs.iter_mut().zip(self.q.columns()) {
                let proj = dot(col, &w);
                *c += proj;
                axpy(-proj, col, &mut w);
            }
        }
        let rho = norm2(&w);
        let mut d: Vec<f64> = (0..m).map(|j| self.normalized_diagonal(j)).collect();
        d.push(rho / vnorm);
        if rcond_of(&d) <= delta {
            return false;
        }
        w.iter_mut().for_each(|x| *x /= rho);
        self.q.columns_mut().push(w);
        self.r.resize(m + 1, m + 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            self.r[(i, m)] = c;
        }
        self.r[(m, m)] = rho;
        true
    }

    /// Deletes the first (oldest) snapshot column and restores triangular
    /// form with Givens rotations.
    pub fn remove_oldest(&mut self) {
        let m = self.n_cols();
        assert!(m > 1, "cannot remove the only column");
        // R without its first column is upper Hessenberg (m x (m-1)).
        let mut h = DenseMatrix::zeros(m, m - 1);
        for i in 0..m {
            for j in 1..m {
                h[(i, j - 1)] = self.r[(i, j)];
            }
        }
        let cols = self.q.columns_mut();
        for k in 0..m - 1 {
            let (a, b) = (h[(k, k)], h[(k + 1, k)]);
            let rr = a.hypot(b);
            if rr == 0.0 {
                continue;
            }
            let (c, s) = (a / rr, b / rr);
            for j in k..m - 1 {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            h[(k + 1, k)] = 0.0;
            let (left, right) = cols.split_at_mut(k + 1);
            let (qk, qk1) = (&mut left[k], &mut right[0]);
            for (x, y) in qk.iter_mut().zip(qk1.iter_mut()) {
                let (xv, yv) = (*x, *y);
                *x = c * xv + s * yv;
                *y = -s * xv + c * yv;
            }
        }
        cols.pop();
        h.resize(m - 1, m - 1);
        self.r = h;
    }
}

fn rcond_of(d: &[f64]) -> f64 {
    let max = d.iter().cloned().fold(0.0, f64::max);
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}
