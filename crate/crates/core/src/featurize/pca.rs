use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Principal components from the eigendecomposition of the sample
/// covariance matrix (divisor n − 1).
///
/// `loadings[i][k]` is the weight of input column `i` in component `k`.
/// Each component's largest-magnitude loading is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub column_mean: Vec<f64>,
    pub loadings: Vec<Vec<f64>>,
    pub explained_variance_ratio: Vec<f64>,
    /// Eigenvalues of every component, retained or not, descending.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    /// Keep the smallest number of components whose cumulative explained
    /// variance ratio reaches `variance_threshold`.
    pub fn fit(matrix: &Matrix, variance_threshold: f64) -> Result<Self> {
        let (n, p) = matrix.shape();
        if n < 2 {
            return Err(Error::TooFewRows { needed: 2, got: n });
        }
        if !(variance_threshold > 0.0 && variance_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "variance threshold {variance_threshold} outside (0, 1]"
            )));
        }
        let mean: Vec<f64> = matrix.column_iter().map(|c| c.mean()).collect();
        let centered = Matrix::from_fn(n, p, |i, j| matrix[(i, j)] - mean[j]);
        let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
        let total: f64 = eigenvalues.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateMatrix);
        }

        let mut m = p;
        let mut cumulative = 0.0;
        for (k, ev) in eigenvalues.iter().enumerate() {
            cumulative += ev / total;
            if cumulative >= variance_threshold - 1e-12 {
                m = k + 1;
                break;
            }
        }

        let mut loadings = vec![vec![0.0; m]; p];
        for (k, &src) in order.iter().take(m).enumerate() {
            let v = eig.eigenvectors.column(src);
            let pivot = v
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(1.0);
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            for i in 0..p {
                loadings[i][k] = sign * v[i];
            }
        }

        Ok(PcaModel {
            column_mean: mean,
            loadings,
            explained_variance_ratio: eigenvalues[..m].iter().map(|e| e / total).collect(),
            eigenvalues,
        })
    }

    pub fn components(&self) -> usize {
        self.explained_variance_ratio.len()
    }

    pub fn input_width(&self) -> usize {
        self.column_mean.len()
    }

    pub fn loadings_matrix(&self) -> Matrix {
        Matrix::from_fn(self.input_width(), self.components(), |i, k| {
            self.loadings[i][k]
        })
    }

    /// Scores `loadingsᵀ (x − mean)`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_width() {
            return Err(Error::DimensionMismatch {
                expected: self.input_width(),
                got: x.len(),
            });
        }
        let mut out = vec![0.0; self.components()];
        for (i, row) in self.loadings.iter().enumerate() {
            let d = x[i] - self.column_mean[i];
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * d;
            }
        }
        Ok(out)
    }

    /// `mean + loadings · scores`.
    pub fn reconstruct(&self, scores: &[f64]) -> Result<Vec<f64>> {
        if scores.len() != self.components() {
            return Err(Error::DimensionMismatch {
                expected: self.components(),
                got: scores.len(),
            });
        }
        Ok(self
            .loadings
            .iter()
            .zip(&self.column_mean)
            .map(|(row, m)| m + row.iter().zip(scores).map(|(w, s)| w * s).sum::<f64>())
            .collect())
    }

    pub fn project_matrix(&self, matrix: &Matrix) -> Result<Matrix> {
        if matrix.ncols() != self.input_width() {
            return Err(Error::DimensionMismatch {
                expected: self.input_width(),
                got: matrix.ncols(),
            });
        }
        // row by row, so a point's scores do not depend on its batch
        let mut out = Matrix::zeros(matrix.nrows(), self.components());
        for r in 0..matrix.nrows() {
            let row: Vec<f64> = matrix.row(r).iter().copied().collect();
            for (c, v) in self.project(&row)?.into_iter().enumerate() {
                out[(r, c)] = v;
            }
        }
        Ok(out)
    }
}
