use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn check(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch(y.len(), yhat.len()));
    }
    if y.is_empty() {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    Ok(())
}

/// Coefficient of determination `1 − SS_res / SS_tot`.
pub fn r2(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if y.iter().all(|v| *v == y[0]) || ss_tot == 0.0 {
        return Err(Error::ConstantTarget);
    }
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    Ok(y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check(y, yhat)?;
    Ok((y.iter().zip(yhat).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64).sqrt())
}

/// R², MAE and RMSE of one prediction set. `r2` is `None` when the targets
/// are constant (for instance a single held-out point).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub r2: Option<f64>,
    pub mae: f64,
    pub rmse: f64,
}

impl MetricSet {
    pub fn compute(y: &[f64], yhat: &[f64]) -> Result<Self> {
        let r2 = match r2(y, yhat) {
            Ok(v) => Some(v),
            Err(Error::ConstantTarget) => None,
            Err(e) => return Err(e),
        };
        Ok(MetricSet {
            r2,
            mae: mae(y, yhat)?,
            rmse: rmse(y, yhat)?,
        })
    }
}
