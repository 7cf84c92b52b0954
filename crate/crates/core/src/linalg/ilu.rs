//! Threshold incomplete LU (ILUT-style, no fill cap).
//!
//! Row `i` is eliminated against the already-computed rows of `U` in
//! increasing column order. An off-diagonal entry is dropped when its
//! magnitude falls below `droptol * ||A[i, :]||_2`; for `L` the test uses
//! `l_ik * u_kk`, the entry before division by the pivot. The diagonal is
//! always kept. With `droptol = 0` this is a complete LU without pivoting.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::gmres::Preconditioner;
use super::{CsrMatrix, LinalgError, Result};

#[derive(Debug, Clone)]
pub struct IluPrecond {
    n: usize,
    droptol: f64,
    /// Strictly lower part of the unit-lower factor, row by row.
    lower: Vec<Vec<(usize, f64)>>,
    /// Strictly upper part of the upper factor, row by row.
    upper: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl IluPrecond {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn droptol(&self) -> f64 {
        self.droptol
    }

    pub fn fill(&self) -> usize {
        self.n
            + self.lower.iter().map(Vec::len).sum::<usize>()
            + self.upper.iter().map(Vec::len).sum::<usize>()
    }

    /// `M^{-1} v` via one forward and one backward sweep.
    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        let mut y = v.to_vec();
        for i in 0..self.n {
            let mut acc = y[i];
            for &(k, l) in &self.lower[i] {
                acc -= l * y[k];
            }
            y[i] = acc;
        }
        for i in (0..self.n).rev() {
            let mut acc = y[i];
            for &(j, u) in &self.upper[i] {
                acc -= u * y[j];
            }
            y[i] = acc / self.diag[i];
        }
        y
    }
}

impl Preconditioner for IluPrecond {
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.solve(v)
    }
}

pub fn ilu_factor(a: &CsrMatrix, droptol: f64) -> Result<IluPrecond> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        });
    }
    assert!(droptol >= 0.0, "droptol must be nonnegative");
    let n = a.n_rows();
    let norms = a.row_norms();

    let mut lower: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut upper: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut diag = vec![0.0; n];

    let mut work = vec![0.0; n];
    let mut in_pattern = vec![false; n];
    let mut pattern: Vec<usize> = Vec::new();
    let mut pending: BinaryHeap<Reverse<usize>> = BinaryHeap::new();

    for i in 0..n {
        let tau = droptol * norms[i];
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            work[j] = v;
            in_pattern[j] = true;
            pattern.push(j);
            if j < i {
                pending.push(Reverse(j));
            }
        }
        if !in_pattern[i] {
            in_pattern[i] = true;
            pattern.push(i);
        }

        let mut lrow = Vec::new();
        while let Some(Reverse(k)) = pending.pop() {
            // Dropping is decided on the unscaled entry, which lives in the
            // same units as the row norm.
            if work[k].abs() < tau || work[k] == 0.0 {
                work[k] = 0.0;
                continue;
            }
            let lik = work[k] / diag[k];
            work[k] = lik;
            lrow.push((k, lik));
            for &(j, ukj) in &upper[k] {
                if !in_pattern[j] {
                    in_pattern[j] = true;
                    pattern.push(j);
                    work[j] = 0.0;
                    if j < i {
                        pending.push(Reverse(j));
                    }
                }
                work[j] -= lik * ukj;
            }
        }

        let pivot = work[i];
        if pivot == 0.0 || !pivot.is_finite() || pivot.abs() <= 1e-14 * norms[i] {
            return Err(LinalgError::ZeroPivot { row: i });
        }
        diag[i] = pivot;
        let mut urow: Vec<(usize, f64)> = pattern
            .iter()
            .filter(|&&j| j > i && work[j] != 0.0 && work[j].abs() >= tau)
            .map(|&j| (j, work[j]))
            .collect();
        urow.sort_unstable_by_key(|&(j, _)| j);
        lrow.sort_unstable_by_key(|&(k, _)| k);

        for &j in &pattern {
            work[j] = 0.0;
            in_pattern[j] = false;
        }
        pattern.clear();
        lower.push(lrow);
        upper.push(urow);
    }

    Ok(IluPrecond {
        n,
        droptol,
        lower,
        upper,
        diag,
    })
}
