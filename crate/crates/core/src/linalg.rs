//! Thin helpers over `nalgebra` dense matrices.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub const JITTER_START: f64 = 1e-10;
pub const JITTER_MAX: f64 = 1e-4;

/// Cholesky factor of `a + jitter * I`, climbing the jitter ladder
/// `1e-10, 1e-9, ..., 1e-4` until the factorisation succeeds.
pub fn cholesky_with_jitter(a: &Matrix) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let mut jitter = JITTER_START;
    loop {
        let mut shifted = a.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(shifted) {
            if chol.l_dirty().diagonal().iter().all(|d| *d > 0.0 && d.is_finite()) {
                return Ok((chol, jitter));
            }
        }
        if jitter >= JITTER_MAX * (1.0 - 1e-9) {
            return Err(Error::NotPositiveDefinite { jitter });
        }
        jitter *= 10.0;
    }
}

/// Build a matrix from row slices.
pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
    let ncols = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Minimum-norm least-squares solve of `a x = b` via SVD.
pub fn lstsq(a: &Matrix, b: &Vector) -> Vector {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * (a.nrows().max(a.ncols()) as f64) * f64::EPSILON;
    svd.solve(b, eps).unwrap_or_else(|_| Vector::zeros(a.ncols()))
}
