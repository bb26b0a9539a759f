use serde::{Deserialize, Serialize};

use super::{CoPyrolysisRecord, Field};
use crate::{Error, Result};

/// Five-number summary plus mean of one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

/// Quantile of sorted data by linear interpolation between closest ranks
/// (h = (n - 1) p).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_values(values: &[f64]) -> Result<QuantileSummary> {
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // mean over the sorted copy so the result is permutation invariant bit-for-bit
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    Ok(QuantileSummary {
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean,
        count: sorted.len(),
    })
}

/// Summarise one field across records. Records lacking the field (yields on
/// prediction rows) are skipped.
pub fn summarize(records: &[CoPyrolysisRecord], field: Field) -> Result<QuantileSummary> {
    let values: Vec<f64> = records.iter().filter_map(|r| field.get(r)).collect();
    summarize_values(&values)
}
