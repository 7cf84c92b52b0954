//! Exact absolute-stability bound of IMEX-RB for `y' = A y` with a
//! diagonalizable, stable `A = T Lambda T^{-1}`.
//!
//! The scheme is absolutely stable whenever
//! `epsilon < C2 = mu_min / (mu_max K_2(T))`, where `mu_min = min |Re lambda|`
//! and `mu_max = max |lambda|`; for a given `dt` the sharper constant is
//! `C1 = (1 + dt mu_min) / (dt mu_max K_2(T))`. `K_2(T)` depends on how the
//! eigenvectors are scaled; here every column of `T` has unit 2-norm.

use nalgebra::{Complex, DMatrix};

use super::{MetricsError, Result};

/// Eigenvector condition numbers above this are treated as defective.
const DEFECTIVE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBound {
    pub mu_min: f64,
    pub mu_max: f64,
    pub k2_t: f64,
    pub c2: f64,
}

impl SpectralBound {
    pub fn c1(&self, dt: f64) -> f64 {
        (1.0 + dt * self.mu_min) / (dt * self.mu_max * self.k2_t)
    }
}

/// Full eigendecomposition of a small dense matrix given by rows.
pub fn exact_stability_bound(rows: &[Vec<f64>]) -> Result<SpectralBound> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(MetricsError::NotSquare {
            rows: n,
            cols: rows.first().map_or(0, Vec::len),
        });
    }
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let scale = a.amax();
    let symmetric = (0..n).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= 1e-14 * scale));

    let (eigenvalues, k2_t) = if symmetric {
        let values: Vec<Complex<f64>> = a.symmetric_eigenvalues().iter().map(|&v| Complex::new(v, 0.0)).collect();
        (values, 1.0)
    } else {
        let values: Vec<Complex<f64>> = a.clone().schur().complex_eigenvalues().iter().copied().collect();
        let Some(t) = eigenvector_matrix(&a, &values) else {
            return Err(MetricsError::Defective(f64::INFINITY));
        };
        let s = t.singular_values();
        let (smax, smin) = s.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)));
        let k2 = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        (values, k2)
    };

    if let Some(l) = eigenvalues.iter().find(|l| l.re >= 0.0) {
        return Err(MetricsError::NotStable { re: l.re, im: l.im });
    }
    if !(k2_t <= DEFECTIVE_LIMIT) {
        return Err(MetricsError::Defective(k2_t));
    }
    let mu_min = eigenvalues.iter().map(|l| l.re.abs()).fold(f64::INFINITY, f64::min);
    let mu_max = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    Ok(SpectralBound {
        mu_min,
        mu_max,
        k2_t,
        c2: mu_min / (mu_max * k2_t),
    })
}

/// Unit eigenvectors as columns. Clustered eigenvalues share one SVD of
/// `A - lambda I`, taking as many trailing right singular vectors as the
/// cluster has members. Returns `None` when a cluster has fewer numerically
/// null directions than members.
fn eigenvector_matrix(a: &DMatrix<f64>, values: &[Complex<f64>]) -> Option<DMatrix<Complex<f64>>> {
    let n = a.nrows();
    let ac: DMatrix<Complex<f64>> = a.map(|x| Complex::new(x, 0.0));
    let tol = 1e-8 * values.iter().map(|l| l.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let null_tol = 1e-7 * a.amax();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (values[i].re, values[i].im)
            .partial_cmp(&(values[j].re, values[j].im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut t = DMatrix::<Complex<f64>>::zeros(n, n);
    let mut col = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[order[end]] - values[order[start]]).norm() <= tol {
            end += 1;
        }
        let members = end - start;
        let lambda = order[start..end].iter().map(|&i| values[i]).sum::<Complex<f64>>() / members as f64;
        let mut shifted = ac.clone();
        for i in 0..n {
            shifted[(i, i)] -= lambda;
        }
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors were requested");
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        if svd.singular_values[idx[members - 1]] > null_tol {
            return None;
        }
        for &k in idx.iter().take(members) {
            // Row k of V^H, conjugated, is the right singular vector.
            for i in 0..n {
                t[(i, col)] = v_t[(k, i)].conj();
            }
            col += 1;
        }
        start = end;
    }
    Some(t)
}
