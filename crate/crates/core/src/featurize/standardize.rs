use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Columns whose population standard deviation falls below this are constant.
pub const CONSTANT_SD: f64 = 1e-12;

/// Per-column z-scoring with population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(matrix: &Matrix) -> Result<Self> {
        let n = matrix.nrows();
        if n < 2 {
            return Err(Error::TooFewRows { needed: 2, got: n });
        }
        let mut mean = Vec::with_capacity(matrix.ncols());
        let mut sd = Vec::with_capacity(matrix.ncols());
        for col in matrix.column_iter() {
            let m = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64;
            mean.push(m);
            sd.push(var.sqrt());
        }
        Ok(Standardizer { mean, sd })
    }

    pub fn is_constant(&self, column: usize) -> bool {
        self.sd[column] < CONSTANT_SD
    }

    fn check(&self, matrix: &Matrix) -> Result<()> {
        if matrix.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: matrix.ncols(),
            });
        }
        Ok(())
    }

    /// Constant columns map to 0.
    pub fn apply(&self, matrix: &Matrix) -> Result<Matrix> {
        self.check(matrix)?;
        Ok(Matrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
            if self.is_constant(j) {
                0.0
            } else {
                (matrix[(i, j)] - self.mean[j]) / self.sd[j]
            }
        }))
    }

    pub fn invert(&self, matrix: &Matrix) -> Result<Matrix> {
        self.check(matrix)?;
        Ok(Matrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
            if self.is_constant(j) {
                self.mean[j]
            } else {
                matrix[(i, j)] * self.sd[j] + self.mean[j]
            }
        }))
    }
}
