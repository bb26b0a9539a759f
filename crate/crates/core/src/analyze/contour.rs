use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CoPyrolysisRecord, RAW_INPUTS, RAW_INPUT_NAMES, YIELD_NAMES};
use crate::models::TrainedBundle;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(index: usize, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if index >= RAW_INPUTS {
            return Err(Error::InvalidConfig(format!("no raw input with index {index}")));
        }
        if steps < 2 {
            return Err(Error::InvalidConfig(format!("contour needs at least 2 steps, got {steps}")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidBounds(format!("axis range [{lo}, {hi}]")));
        }
        Ok(AxisSpec {
            name: RAW_INPUT_NAMES[index].to_string(),
            index,
            lo,
            hi,
            steps,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
        }
    }
}

/// Predicted yields on a `steps × steps` lattice over two raw inputs, all
/// others held at `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourGrid {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub fixed: Vec<f64>,
    /// `surfaces[output][i][j]` at `(x.value(i), y.value(j))`, yields in percent.
    pub surfaces: Vec<Vec<Vec<f64>>>,
}

impl ContourGrid {
    /// Long-form CSV `x_name,y_name,oil_yield,char_yield,syngas_yield`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{},{}\n", self.x.name, self.y.name, YIELD_NAMES.join(","));
        for i in 0..self.x.steps {
            for j in 0..self.y.steps {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    self.x.value(i),
                    self.y.value(j),
                    self.surfaces[0][i][j],
                    self.surfaces[1][i][j],
                    self.surfaces[2][i][j]
                ));
            }
        }
        out
    }

    /// Lattice indices of the largest value of `output`.
    pub fn argmax(&self, output: usize) -> (usize, usize) {
        let mut best = (0, 0);
        for i in 0..self.x.steps {
            for j in 0..self.y.steps {
                if self.surfaces[output][i][j] > self.surfaces[output][best.0][best.1] {
                    best = (i, j);
                }
            }
        }
        best
    }
}

pub fn contour_grid(
    bundle: &TrainedBundle,
    x: AxisSpec,
    y: AxisSpec,
    fixed: &[f64],
) -> Result<ContourGrid> {
    if x.index == y.index {
        return Err(Error::InvalidConfig(format!(
            "contour axes must differ, both are {}",
            x.name
        )));
    }
    if fixed.len() != RAW_INPUTS {
        return Err(Error::LengthMismatch(RAW_INPUTS, fixed.len()));
    }
    CoPyrolysisRecord::from_raw_inputs("fixed", fixed)
        .validate(1)
        .map_err(|e| Error::InfeasibleFixedPoint(e.to_string()))?;
    let rows: Vec<Vec<[f64; 3]>> = (0..x.steps)
        .into_par_iter()
        .map(|i| {
            let points: Vec<Vec<f64>> = (0..y.steps)
                .map(|j| {
                    let mut p = fixed.to_vec();
                    p[x.index] = x.value(i);
                    p[y.index] = y.value(j);
                    p
                })
                .collect();
            bundle.predict_raw_batch(&points)
        })
        .collect::<Result<_>>()?;
    let surfaces = (0..3)
        .map(|o| {
            rows.iter()
                .map(|r| r.iter().map(|v| v[o]).collect())
                .collect()
        })
        .collect();
    Ok(ContourGrid {
        x,
        y,
        fixed: fixed.to_vec(),
        surfaces,
    })
}
