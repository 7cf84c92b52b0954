//! Spectral condition number estimate `K_2(A) = sigma_max / sigma_min`.
//!
//! Both extreme singular values come from Lanczos runs on symmetric positive
//! definite operators: `A^T A` for the largest one and `A^{-1} A^{-T}` for
//! the smallest one. The inverse is applied with ILU-preconditioned GMRES.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vector::{axpy, dot, norm2};
use super::{gmres, ilu_factor, CsrMatrix, GmresOptions, LinalgError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondEstimate {
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl CondEstimate {
    pub fn cond(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// Largest eigenvalue of the symmetric positive semidefinite operator
/// `apply`, by Lanczos with full reorthogonalization.
///
/// Stops once the top Ritz value changes by less than `tol / 10` (relative)
/// over two consecutive iterations, or when the Krylov space is exhausted.
pub fn lanczos_extreme_eigenvalue<F>(mut apply: F, n: usize, tol: f64, seed: u64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let max_iter = n.min(400);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    let mut steady = 0;
    let stop = tol / 10.0;

    for k in 0..max_iter {
        let mut w = apply(&basis[k])?;
        if !w.iter().all(|x| x.is_finite()) {
            return Err(LinalgError::Estimate("operator produced non-finite values".into()));
        }
        let a = dot(&w, &basis[k]);
        alpha.push(a);
        for _pass in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let theta = tridiagonal_max_eigenvalue(&alpha, &beta);
        let b = norm2(&w);
        if last.is_finite() && (theta - last).abs() <= stop * theta.abs() {
            steady += 1;
        } else {
            steady = 0;
        }
        last = theta;
        if steady >= 2 || b <= 1e-12 * theta.abs().max(f64::MIN_POSITIVE) || k + 1 == max_iter {
            return Ok(theta);
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    Ok(last)
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, by Sturm-sequence bisection.
fn tridiagonal_max_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let n = alpha.len();
    let radius = |i: usize| {
        let left = if i > 0 { beta[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { beta[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..n {
            let off = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { off / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Estimates both extreme singular values of a square sparse matrix.
pub fn singular_value_bounds(a: &CsrMatrix, tol: f64) -> Result<CondEstimate> {
    singular_value_bounds_seeded(a, tol, DEFAULT_SEED)
}

const DEFAULT_SEED: u64 = 0x5eed;

/// [`singular_value_bounds`] with an explicit seed for the Lanczos start
/// vectors.
pub fn singular_value_bounds_seeded(a: &CsrMatrix, tol: f64, seed: u64) -> Result<CondEstimate> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    let at = a.transpose();
    let top = lanczos_extreme_eigenvalue(|x| Ok(at.mul_vec(&a.mul_vec(x))), n, tol, seed)?;
    let sigma_max = top.max(0.0).sqrt();

    let pre = ilu_factor(a, 1e-3).map_err(|_| singular())?;
    let pre_t = ilu_factor(&at, 1e-3).map_err(|_| singular())?;
    let opts = GmresOptions {
        rtol: 1e-12,
        max_iter: 1000,
    };
    let inverse = |x: &[f64]| -> Result<Vec<f64>> {
        let z = gmres(&at, x, Some(&pre_t), &opts).map_err(|_| singular())?;
        let y = gmres(a, &z.x, Some(&pre), &opts).map_err(|_| singular())?;
        if !(z.converged && y.converged) {
            return Err(LinalgError::Estimate(
                "inner solve for the smallest singular value did not converge".into(),
            ));
        }
        Ok(y.x)
    };
    let inv_top = lanczos_extreme_eigenvalue(inverse, n, tol, seed.wrapping_add(1))?;
    if !inv_top.is_finite() || inv_top <= 0.0 {
        return Err(singular());
    }
    let sigma_min = 1.0 / inv_top.sqrt();
    if sigma_min <= f64::EPSILON * sigma_max {
        return Err(singular());
    }
    Ok(CondEstimate {
        sigma_max,
        sigma_min,
    })
}

/// `sigma_max / sigma_min` to roughly relative accuracy `tol`.
pub fn cond2_estimate(a: &CsrMatrix, tol: f64) -> Result<f64> {
    singular_value_bounds(a, tol).map(|e| e.cond())
}

fn singular() -> LinalgError {
    LinalgError::Singular {
        column: 0,
        pivot: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_condition() {
        let c = cond2_estimate(&CsrMatrix::identity(5), 1e-2).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn diagonal_condition() {
        let c = cond2_estimate(&CsrMatrix::from_diagonal(&[1.0, 10.0]), 1e-2).unwrap();
        assert!((c - 10.0).abs() < 1e-8);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(cond2_estimate(&a, 1e-2).is_err());
    }

    #[test]
    fn tridiagonal_bisection() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let top = tridiagonal_max_eigenvalue(&[2.0, 2.0], &[1.0]);
        assert!((top - 3.0).abs() < 1e-12);
    }
}
