use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{construct_matrix, MinMaxScaler, PcaModel, Standardizer};
use crate::dataset::{require_training, CoPyrolysisRecord};
use crate::linalg::Matrix;
use crate::{Error, Result};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// z-score the constructed columns before PCA.
    pub standardize: bool,
    pub variance_threshold: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            standardize: true,
            variance_threshold: DEFAULT_VARIANCE_THRESHOLD,
        }
    }
}

/// Fitted preprocessing chain: constructed features → standardiser → PCA →
/// min-max on scores, plus an independent min-max scaler on the three yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub options: PipelineOptions,
    pub standardizer: Option<Standardizer>,
    pub pca: PcaModel,
    pub score_scaler: MinMaxScaler,
    pub target_scaler: MinMaxScaler,
}

/// Yields as an n × 3 matrix (oil, char, syngas).
pub fn target_matrix(records: &[CoPyrolysisRecord]) -> Result<Matrix> {
    let rows = records
        .iter()
        .map(|r| r.require_yields().map(|y| y.to_array()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_fn(rows.len(), 3, |i, j| rows[i][j]))
}

impl FeaturePipeline {
    pub fn fit(records: &[CoPyrolysisRecord], options: PipelineOptions) -> Result<Self> {
        require_training(records)?;
        let z = construct_matrix(records);
        let standardizer = if options.standardize {
            Some(Standardizer::fit(&z)?)
        } else {
            None
        };
        let conditioned = match &standardizer {
            Some(s) => s.apply(&z)?,
            None => z,
        };
        let pca = PcaModel::fit(&conditioned, options.variance_threshold)?;
        let scores = pca.project_matrix(&conditioned)?;
        let score_scaler = MinMaxScaler::fit(&scores);
        let target_scaler = MinMaxScaler::fit(&target_matrix(records)?);
        Ok(FeaturePipeline {
            options,
            standardizer,
            pca,
            score_scaler,
            target_scaler,
        })
    }

    /// Number of model inputs (retained components).
    pub fn width(&self) -> usize {
        self.pca.components()
    }

    /// Normalised PCA scores of the records' inputs; yields are ignored.
    pub fn transform_inputs(&self, records: &[CoPyrolysisRecord]) -> Result<Matrix> {
        let z = construct_matrix(records);
        let conditioned = match &self.standardizer {
            Some(s) => s.apply(&z)?,
            None => z,
        };
        let scores = self.pca.project_matrix(&conditioned)?;
        self.score_scaler.apply(&scores)
    }

    /// Scores and normalised targets. Every record must carry yields.
    pub fn transform(&self, records: &[CoPyrolysisRecord]) -> Result<(Matrix, Matrix)> {
        let x = self.transform_inputs(records)?;
        let y = self.target_scaler.apply(&target_matrix(records)?)?;
        Ok((x, y))
    }

    pub fn normalize_target(&self, output: usize, value: f64) -> f64 {
        self.target_scaler.apply_value(output, value)
    }

    pub fn denormalize_target(&self, output: usize, value: f64) -> f64 {
        self.target_scaler.invert_value(output, value)
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("pipeline serialises");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn check_fingerprint(&self, expected: &str) -> Result<()> {
        let actual = self.fingerprint();
        if actual != expected {
            return Err(Error::PipelineMismatch(format!(
                "model was trained against pipeline {expected}, got {actual}"
            )));
        }
        Ok(())
    }
}
