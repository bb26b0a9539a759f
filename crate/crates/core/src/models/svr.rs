//! ε-insensitive support vector regression solved in the dual by SMO with
//! second-order working-set selection.
//!
//! The dual is posed over `2n` variables `a = (α, α*)` with signs
//! `s = (+1…, −1…)`:
//!
//! ```text
//! min ½ aᵀQa + pᵀa   s.t.  sᵀa = 0,  0 ≤ a ≤ C
//! Q_ts = s_t s_s K(x_t, x_s),  p = (ε − y, ε + y)
//! ```
//!
//! and the regression coefficients are `β = α − α*`.

use serde::{Deserialize, Serialize};

use super::spec::RegressorSpec;
use super::{check_width, check_xy};
use crate::linalg::{Matrix, Vector};
use crate::{Error, Result};

pub const SVR_TOLERANCE: f64 = 1e-6;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SvrKernel {
    Rbf { gamma: f64 },
    Linear,
}

impl SvrKernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            SvrKernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                (-gamma * d2).exp()
            }
            SvrKernel::Linear => a.iter().zip(b).map(|(u, v)| u * v).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: SvrKernel,
    pub c: f64,
    pub epsilon: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// `α_i − α*_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

/// Raw dual solution over all training points.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

impl DualSolution {
    /// Dual objective `½βᵀKβ + ε‖β‖₁ − yᵀβ`.
    pub fn objective(&self, gram: &Matrix, y: &[f64], epsilon: f64) -> f64 {
        let n = self.beta.len();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += self.beta[i] * self.beta[j] * gram[(i, j)];
            }
        }
        0.5 * quad
            + self
                .beta
                .iter()
                .zip(y)
                .map(|(b, t)| epsilon * b.abs() - t * b)
                .sum::<f64>()
    }
}

pub fn iteration_cap(n: usize) -> usize {
    100_000usize.max(2000 * n)
}

/// SMO on a precomputed Gram matrix.
pub fn solve_dual(gram: &Matrix, y: &[f64], c: f64, epsilon: f64) -> Result<DualSolution> {
    let n = y.len();
    let m = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let idx = |t: usize| if t < n { t } else { t - n };
    let q = |t: usize, s: usize| sign(t) * sign(s) * gram[(idx(t), idx(s))];

    let mut a = vec![0.0; m];
    let mut g: Vec<f64> = (0..m)
        .map(|t| if t < n { epsilon - y[t] } else { epsilon + y[t - n] })
        .collect();
    let is_up = |t: usize, a: &[f64]| if t < n { a[t] < c } else { a[t] > 0.0 };
    let is_low = |t: usize, a: &[f64]| if t < n { a[t] > 0.0 } else { a[t] < c };

    let cap = iteration_cap(n);
    let mut iterations = 0;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..m {
            if is_up(t, &a) && -sign(t) * g[t] > gmax {
                gmax = -sign(t) * g[t];
                i = t;
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..m {
            if !is_low(t, &a) {
                continue;
            }
            let v = -sign(t) * g[t];
            gmin = gmin.min(v);
            if i != usize::MAX {
                let b = gmax - v;
                if b > 0.0 {
                    let mut curv = q(i, i) + q(t, t) - 2.0 * sign(i) * sign(t) * q(i, t);
                    if curv <= 0.0 {
                        curv = TAU;
                    }
                    let score = -(b * b) / curv;
                    if score < best {
                        best = score;
                        j = t;
                    }
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < SVR_TOLERANCE {
            break;
        }
        if iterations >= cap {
            return Err(Error::SolverNotConverged { iterations });
        }
        iterations += 1;

        let (old_i, old_j) = (a[i], a[j]);
        let qij = q(i, j);
        if sign(i) != sign(j) {
            let mut quad = q(i, i) + q(j, j) + 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * qij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for t in 0..m {
            g[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // ρ from free variables, or the midpoint of the feasible interval.
    let (mut ub, mut lb, mut sum, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for t in 0..m {
        let yg = sign(t) * g[t];
        let at_upper = a[t] >= c;
        let at_lower = a[t] <= 0.0;
        if at_upper {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    };
    Ok(DualSolution {
        beta: (0..n).map(|i| a[i] - a[i + n]).collect(),
        bias: -rho,
        iterations,
    })
}

impl SvrModel {
    pub fn fit(x: &Matrix, y: &Vector, kernel: SvrKernel, c: f64, epsilon: f64) -> Result<Self> {
        check_xy(x, y)?;
        if !(c > 0.0) || !(epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "SVR needs C > 0 and ε ≥ 0 (got C = {c}, ε = {epsilon})"
            )));
        }
        if let SvrKernel::Rbf { gamma } = kernel {
            if !(gamma > 0.0) {
                return Err(Error::InvalidConfig(format!("SVR gamma must be positive, got {gamma}")));
            }
        }
        let rows = rows_of(x);
        let gram = gram_matrix(&kernel, &rows);
        let dual = solve_dual(&gram, y.as_slice(), c, epsilon)?;
        let (support_vectors, coefficients) = rows
            .into_iter()
            .zip(&dual.beta)
            .filter(|(_, b)| **b != 0.0)
            .map(|(r, b)| (r, *b))
            .unzip();
        Ok(SvrModel {
            kernel,
            c,
            epsilon,
            support_vectors,
            coefficients,
            bias: dual.bias,
            iterations: dual.iterations,
        })
    }

    pub fn fit_spec(x: &Matrix, y: &Vector, spec: &RegressorSpec) -> Result<Self> {
        let kernel = if spec.get_or("kernel", 0.0).round() as i64 == 1 {
            SvrKernel::Linear
        } else {
            SvrKernel::Rbf {
                gamma: spec.get("gamma")?,
            }
        };
        SvrModel::fit(x, y, kernel, spec.get("c")?, spec.get("epsilon")?)
    }

    pub fn input_width(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vector> {
        if !self.support_vectors.is_empty() {
            check_width(self.input_width(), x)?;
        }
        Ok(Vector::from_iterator(
            x.nrows(),
            rows_of(x).iter().map(|r| {
                self.bias
                    + self
                        .support_vectors
                        .iter()
                        .zip(&self.coefficients)
                        .map(|(sv, b)| b * self.kernel.eval(sv, r))
                        .sum::<f64>()
            }),
        ))
    }
}

fn rows_of(x: &Matrix) -> Vec<Vec<f64>> {
    (0..x.nrows())
        .map(|i| x.row(i).iter().copied().collect())
        .collect()
}

pub fn gram_matrix(kernel: &SvrKernel, rows: &[Vec<f64>]) -> Matrix {
    let n = rows.len();
    Matrix::from_fn(n, n, |i, j| kernel.eval(&rows[i], &rows[j]))
}
