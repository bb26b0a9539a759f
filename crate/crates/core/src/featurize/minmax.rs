use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Affine map of each column onto [0, 1] over the fitting set. Values outside
/// the fitted range are not clamped; constant columns map to 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(matrix: &Matrix) -> Self {
        let (min, max) = matrix
            .column_iter()
            .map(|c| (c.min(), c.max()))
            .unzip();
        MinMaxScaler { min, max }
    }

    pub fn width(&self) -> usize {
        self.min.len()
    }

    fn range(&self, j: usize) -> f64 {
        self.max[j] - self.min[j]
    }

    pub fn apply_value(&self, j: usize, v: f64) -> f64 {
        let r = self.range(j);
        if r > 0.0 {
            (v - self.min[j]) / r
        } else {
            0.5
        }
    }

    pub fn invert_value(&self, j: usize, s: f64) -> f64 {
        let r = self.range(j);
        if r > 0.0 {
            self.min[j] + s * r
        } else {
            self.min[j]
        }
    }

    fn check(&self, matrix: &Matrix) -> Result<()> {
        if matrix.ncols() != self.width() {
            return Err(Error::DimensionMismatch {
                expected: self.width(),
                got: matrix.ncols(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, matrix: &Matrix) -> Result<Matrix> {
        self.check(matrix)?;
        Ok(Matrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
            self.apply_value(j, matrix[(i, j)])
        }))
    }

    pub fn invert(&self, matrix: &Matrix) -> Result<Matrix> {
        self.check(matrix)?;
        Ok(Matrix::from_fn(matrix.nrows(), matrix.ncols(), |i, j| {
            self.invert_value(j, matrix[(i, j)])
        }))
    }
}
