//! Additive model fitted by least-squares boosting of depth-1 stumps.
//!
//! Each round scores the best stump of every feature against the current
//! residual and applies the one with the largest squared-error reduction,
//! shrunk by the learning rate. Ties go to the lower feature index.

use serde::{Deserialize, Serialize};

use super::spec::RegressorSpec;
use super::{check_width, check_xy};
use crate::linalg::{Matrix, Vector};
use crate::{Error, Result};

/// Piecewise-constant function: `values[k]` applies on
/// `(breakpoints[k−1], breakpoints[k]]`, with open ends at ±∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl ShapeFunction {
    pub fn zero() -> Self {
        ShapeFunction {
            breakpoints: Vec::new(),
            values: vec![0.0],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|t| *t < x)]
    }

    fn from_stumps(stumps: &[Stump]) -> Self {
        let mut breakpoints: Vec<f64> = stumps.iter().map(|s| s.threshold).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let mut value: f64 = stumps.iter().map(|s| s.left).sum();
        let mut values = vec![value];
        for t in &breakpoints {
            for s in stumps.iter().filter(|s| s.threshold == *t) {
                value += s.right - s.left;
            }
            values.push(value);
        }
        ShapeFunction {
            breakpoints,
            values,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Stump {
    threshold: f64,
    left: f64,
    right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamModel {
    pub intercept: f64,
    pub shapes: Vec<ShapeFunction>,
    pub rounds: usize,
    pub learning_rate: f64,
}

impl GamModel {
    pub fn fit(x: &Matrix, y: &Vector, rounds: usize, learning_rate: f64) -> Result<Self> {
        check_xy(x, y)?;
        if !(learning_rate > 0.0 && learning_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "GAM learning rate must lie in (0, 1], got {learning_rate}"
            )));
        }
        let (n, d) = (x.nrows(), x.ncols());
        let intercept = y.mean();
        let mut residual: Vec<f64> = y.iter().map(|v| v - intercept).collect();
        let order: Vec<Vec<usize>> = (0..d)
            .map(|j| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| x[(a, j)].total_cmp(&x[(b, j)]));
                idx
            })
            .collect();
        let mut stumps: Vec<Vec<Stump>> = vec![Vec::new(); d];
        for _ in 0..rounds {
            let mut best: Option<(usize, Stump, f64)> = None;
            for j in 0..d {
                if let Some((stump, gain)) = best_stump(x, j, &order[j], &residual) {
                    if best.as_ref().is_none_or(|b| gain > b.2) {
                        best = Some((j, stump, gain));
                    }
                }
            }
            let Some((j, stump, _)) = best else { break };
            let stump = Stump {
                threshold: stump.threshold,
                left: learning_rate * stump.left,
                right: learning_rate * stump.right,
            };
            for (i, r) in residual.iter_mut().enumerate() {
                *r -= if x[(i, j)] <= stump.threshold {
                    stump.left
                } else {
                    stump.right
                };
            }
            stumps[j].push(stump);
        }
        Ok(GamModel {
            intercept,
            shapes: stumps.iter().map(|s| ShapeFunction::from_stumps(s)).collect(),
            rounds,
            learning_rate,
        })
    }

    pub fn fit_spec(x: &Matrix, y: &Vector, spec: &RegressorSpec) -> Result<Self> {
        GamModel::fit(
            x,
            y,
            spec.get("rounds")?.round() as usize,
            spec.get("learning_rate")?,
        )
    }

    pub fn input_width(&self) -> usize {
        self.shapes.len()
    }

    /// Per-feature contributions for one input row.
    pub fn contributions(&self, row: &[f64]) -> Vec<f64> {
        self.shapes
            .iter()
            .zip(row)
            .map(|(s, v)| s.eval(*v))
            .collect()
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vector> {
        check_width(self.input_width(), x)?;
        Ok(Vector::from_iterator(
            x.nrows(),
            (0..x.nrows()).map(|i| {
                let row: Vec<f64> = x.row(i).iter().copied().collect();
                self.intercept + self.contributions(&row).iter().sum::<f64>()
            }),
        ))
    }
}

/// Least-squares stump on feature `j`, returning it with its SSE reduction.
fn best_stump(x: &Matrix, j: usize, order: &[usize], residual: &[f64]) -> Option<(Stump, f64)> {
    let n = order.len();
    let total: f64 = residual.iter().sum();
    let mut left_sum = 0.0;
    let mut best: Option<(Stump, f64)> = None;
    for k in 0..n - 1 {
        let (a, b) = (order[k], order[k + 1]);
        left_sum += residual[a];
        let (xa, xb) = (x[(a, j)], x[(b, j)]);
        if xa == xb {
            continue;
        }
        let nl = (k + 1) as f64;
        let nr = (n - k - 1) as f64;
        let right_sum = total - left_sum;
        let gain = left_sum * left_sum / nl + right_sum * right_sum / nr;
        if best.as_ref().is_none_or(|b| gain > b.1) {
            best = Some((
                Stump {
                    threshold: xa + (xb - xa) / 2.0,
                    left: left_sum / nl,
                    right: right_sum / nr,
                },
                gain,
            ));
        }
    }
    best
}
