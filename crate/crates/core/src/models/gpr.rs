//! Gaussian process regression with an ARD rational quadratic kernel and an
//! explicit polynomial basis.
//!
//! ```text
//! k(x, x') = σ_f² (1 + r² / (2α))^(−α),   r² = Σ_d (x_d − x'_d)² / ℓ_d²
//! y = h(x)ᵀβ + f(x) + ε,   f ~ GP(0, k),   ε ~ N(0, σ_n²)
//! ```
//!
//! β is the generalised least-squares estimate under `K = k(X, X) + σ_n² I`.
//! The reported predictive variance is that of the latent `f`, with β held
//! at its estimate.

use serde::{Deserialize, Serialize};

use super::spec::RegressorSpec;
use super::{check_width, check_xy};
use crate::linalg::{cholesky_with_jitter, lstsq, Matrix, Vector};
use crate::{Error, Result};

/// Per-dimension lengthscale multipliers are tuned for at most this many inputs.
pub const ARD_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    None,
    Constant,
    Linear,
}

impl Basis {
    pub fn from_code(code: f64) -> Result<Self> {
        match code.round() as i64 {
            0 => Ok(Basis::None),
            1 => Ok(Basis::Constant),
            2 => Ok(Basis::Linear),
            _ => Err(Error::InvalidConfig(format!("unknown basis code {code}"))),
        }
    }

    fn width(&self, d: usize) -> usize {
        match self {
            Basis::None => 0,
            Basis::Constant => 1,
            Basis::Linear => d + 1,
        }
    }

    fn row(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Basis::None => Vec::new(),
            Basis::Constant => vec![1.0],
            Basis::Linear => std::iter::once(1.0).chain(x.iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GprHyperparameters {
    /// Scale-mixture parameter.
    pub alpha: f64,
    /// Signal standard deviation.
    pub sigma_f: f64,
    /// Noise standard deviation.
    pub sigma_n: f64,
    pub lengthscales: Vec<f64>,
    pub basis: Basis,
}

impl GprHyperparameters {
    /// Tuned values reported for the oil (0), char (1) and syngas (2) models,
    /// with unit lengthscales and a small noise term.
    pub fn reported(output: usize, inputs: usize) -> Self {
        let (alpha, sigma_f) = match output {
            0 => (1.174, 0.160),
            1 => (1.158, 0.139),
            _ => (1.158, 0.139),
        };
        GprHyperparameters {
            alpha,
            sigma_f,
            sigma_n: 1e-2,
            lengthscales: vec![1.0; inputs],
            basis: Basis::Linear,
        }
    }

    /// Shared `lengthscale` times `ard_i` for the first [`ARD_CAP`] inputs.
    pub fn from_spec(spec: &RegressorSpec, inputs: usize) -> Result<Self> {
        let shared = spec.get("lengthscale")?;
        let lengthscales = (0..inputs)
            .map(|i| shared * spec.get_or(&format!("ard_{i}"), 1.0))
            .collect();
        Ok(GprHyperparameters {
            alpha: spec.get("alpha")?,
            sigma_f: spec.get("sigma_f")?,
            sigma_n: spec.get("sigma_n")?,
            lengthscales,
            basis: Basis::from_code(spec.get_or("basis", 2.0))?,
        })
    }

    fn validate(&self) -> Result<()> {
        let positive = self.alpha > 0.0
            && self.sigma_f > 0.0
            && self.sigma_n >= 0.0
            && self.lengthscales.iter().all(|l| *l > 0.0 && l.is_finite());
        if !positive || !self.alpha.is_finite() || !self.sigma_f.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "GPR hyperparameters must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        let r2: f64 = a
            .iter()
            .zip(b)
            .zip(&self.lengthscales)
            .map(|((x, y), l)| ((x - y) / l).powi(2))
            .sum();
        self.sigma_f * self.sigma_f * (-self.alpha * (r2 / (2.0 * self.alpha)).ln_1p()).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GprModel {
    pub hyperparameters: GprHyperparameters,
    pub basis_coefficients: Vec<f64>,
    /// Rows of the lower Cholesky factor of `K + jitter·I`; row `i` holds `i + 1` entries.
    pub factor: Vec<Vec<f64>>,
    pub jitter: f64,
    pub train_x: Vec<Vec<f64>>,
    /// `K⁻¹ (y − Hβ)`.
    pub weights: Vec<f64>,
    pub nlml: f64,
}

fn rows(x: &Matrix) -> Vec<Vec<f64>> {
    (0..x.nrows())
        .map(|i| x.row(i).iter().copied().collect())
        .collect()
}

impl GprModel {
    pub fn fit(x: &Matrix, y: &Vector, hp: &GprHyperparameters) -> Result<Self> {
        check_xy(x, y)?;
        hp.validate()?;
        let (n, d) = x.shape();
        if hp.lengthscales.len() != d {
            return Err(Error::DimensionMismatch {
                expected: hp.lengthscales.len(),
                got: d,
            });
        }
        let train_x = rows(x);
        let noise = hp.sigma_n * hp.sigma_n;
        let mut k = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = hp.kernel(&train_x[i], &train_x[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(i, i)] += noise;
        }
        let (chol, jitter) = cholesky_with_jitter(&k)?;

        let q = hp.basis.width(d);
        let beta = if q > 0 {
            let h = Matrix::from_fn(n, q, |i, j| hp.basis.row(&train_x[i])[j]);
            let kih = chol.solve(&h);
            let a = h.transpose() * &kih;
            let a = (&a + a.transpose()) * 0.5;
            let rhs = kih.transpose() * y;
            lstsq(&a, &rhs)
        } else {
            Vector::zeros(0)
        };
        let residual = if q > 0 {
            let h = Matrix::from_fn(n, q, |i, j| hp.basis.row(&train_x[i])[j]);
            y - h * &beta
        } else {
            y.clone()
        };
        let weights = chol.solve(&residual);
        let l = chol.l();
        let log_det: f64 = l.diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
        let nlml = 0.5 * residual.dot(&weights)
            + 0.5 * log_det
            + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
        let factor = (0..n)
            .map(|i| (0..=i).map(|j| l[(i, j)]).collect())
            .collect();

        Ok(GprModel {
            hyperparameters: hp.clone(),
            basis_coefficients: beta.iter().copied().collect(),
            factor,
            jitter,
            train_x,
            weights: weights.iter().copied().collect(),
            nlml,
        })
    }

    pub fn input_width(&self) -> usize {
        self.hyperparameters.lengthscales.len()
    }

    /// 2-norm of the basis coefficients, comparable to a single reported "beta".
    pub fn beta_norm(&self) -> f64 {
        self.basis_coefficients.iter().map(|b| b * b).sum::<f64>().sqrt()
    }

    fn mean_at(&self, x: &[f64], kstar: &[f64]) -> f64 {
        let basis: f64 = self
            .hyperparameters
            .basis
            .row(x)
            .iter()
            .zip(&self.basis_coefficients)
            .map(|(h, b)| h * b)
            .sum();
        basis + kstar.iter().zip(&self.weights).map(|(k, w)| k * w).sum::<f64>()
    }

    fn kstar(&self, x: &[f64]) -> Vec<f64> {
        self.train_x
            .iter()
            .map(|t| self.hyperparameters.kernel(x, t))
            .collect()
    }

    pub fn predict_mean(&self, x: &Matrix) -> Result<Vector> {
        check_width(self.input_width(), x)?;
        Ok(Vector::from_iterator(
            x.nrows(),
            rows(x).iter().map(|q| self.mean_at(q, &self.kstar(q))),
        ))
    }

    /// Posterior mean and latent variance; variance is clamped at zero.
    pub fn predict(&self, x: &Matrix) -> Result<(Vector, Vector)> {
        check_width(self.input_width(), x)?;
        let prior = self.hyperparameters.sigma_f.powi(2);
        let mut mean = Vector::zeros(x.nrows());
        let mut var = Vector::zeros(x.nrows());
        for (r, q) in rows(x).iter().enumerate() {
            let kstar = self.kstar(q);
            mean[r] = self.mean_at(q, &kstar);
            // forward substitution L v = k*
            let mut v = vec![0.0; kstar.len()];
            for i in 0..kstar.len() {
                let row = &self.factor[i];
                let s: f64 = row[..i].iter().zip(&v[..i]).map(|(a, b)| a * b).sum();
                v[i] = (kstar[i] - s) / row[i];
            }
            var[r] = (prior - v.iter().map(|e| e * e).sum::<f64>()).max(0.0);
        }
        Ok((mean, var))
    }
}

/// Negative log marginal likelihood of the residual after the GLS basis fit.
pub fn gpr_nlml(x: &Matrix, y: &Vector, hp: &GprHyperparameters) -> Result<f64> {
    GprModel::fit(x, y, hp).map(|m| m.nlml)
}
