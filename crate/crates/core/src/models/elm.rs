//! Extreme learning machine: a single hidden layer with random, fixed input
//! weights and ridge-regressed output weights.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::spec::RegressorSpec;
use super::{check_width, check_xy};
use crate::linalg::{Matrix, Vector};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Tanh,
}

impl Activation {
    fn apply(&self, v: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-v).exp()),
            Activation::Tanh => v.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElmModel {
    pub activation: Activation,
    pub ridge: f64,
    /// `hidden × inputs`, drawn from U(−1, 1).
    pub input_weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub output_weights: Vec<f64>,
}

impl ElmModel {
    pub fn fit(
        x: &Matrix,
        y: &Vector,
        hidden: usize,
        ridge: f64,
        activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        check_xy(x, y)?;
        if hidden == 0 {
            return Err(Error::InvalidConfig("ELM needs at least one hidden unit".into()));
        }
        if !(ridge >= 0.0) {
            return Err(Error::InvalidConfig("ELM ridge must be non-negative".into()));
        }
        let d = x.ncols();
        let mut r = rng::substream(seed, "elm.weights");
        let input_weights: Vec<Vec<f64>> = (0..hidden)
            .map(|_| (0..d).map(|_| r.random_range(-1.0..1.0)).collect())
            .collect();
        let biases: Vec<f64> = (0..hidden).map(|_| r.random_range(-1.0..1.0)).collect();
        let mut model = ElmModel {
            activation,
            ridge,
            input_weights,
            biases,
            output_weights: vec![0.0; hidden],
        };
        let h = model.hidden_matrix(x);
        model.output_weights = ridge_solve(&h, y, ridge).iter().copied().collect();
        Ok(model)
    }

    pub fn fit_spec(x: &Matrix, y: &Vector, spec: &RegressorSpec) -> Result<Self> {
        let activation = match spec.get_or("activation", 0.0).round() as i64 {
            0 => Activation::Sigmoid,
            _ => Activation::Tanh,
        };
        ElmModel::fit(
            x,
            y,
            spec.get("hidden")?.round() as usize,
            spec.get("lambda")?,
            activation,
            spec.seed,
        )
    }

    pub fn input_width(&self) -> usize {
        self.input_weights.first().map_or(0, Vec::len)
    }

    pub fn hidden_count(&self) -> usize {
        self.biases.len()
    }

    /// Hidden-layer activations, `n × hidden`.
    pub fn hidden_matrix(&self, x: &Matrix) -> Matrix {
        Matrix::from_fn(x.nrows(), self.hidden_count(), |i, j| {
            let z: f64 = self.input_weights[j]
                .iter()
                .zip(x.row(i).iter())
                .map(|(w, v)| w * v)
                .sum();
            self.activation.apply(z + self.biases[j])
        })
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vector> {
        check_width(self.input_width(), x)?;
        let h = self.hidden_matrix(x);
        Ok(Vector::from_iterator(
            x.nrows(),
            (0..x.nrows()).map(|i| {
                h.row(i)
                    .iter()
                    .zip(&self.output_weights)
                    .map(|(a, b)| a * b)
                    .sum()
            }),
        ))
    }
}

/// `argmin ‖Hβ − y‖² + λ‖β‖²` through the SVD of `H`, which covers both
/// the over- and under-determined cases (`λ = 0` gives the minimum-norm
/// least-squares solution).
fn ridge_solve(h: &Matrix, y: &Vector, ridge: f64) -> Vector {
    let svd = h.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u computed");
    let vt = svd.v_t.as_ref().expect("v_t computed");
    let smax = svd.singular_values.max();
    let cutoff = smax * (h.nrows().max(h.ncols()) as f64) * f64::EPSILON;
    let uty = u.transpose() * y;
    let scaled = Vector::from_iterator(
        uty.len(),
        uty.iter().zip(svd.singular_values.iter()).map(|(c, s)| {
            if *s <= cutoff && ridge == 0.0 {
                0.0
            } else {
                c * s / (s * s + ridge)
            }
        }),
    );
    vt.transpose() * scaled
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize) -> (Matrix, Vector) {
        let x = Matrix::from_fn(n, 2, |i, j| ((i * 3 + j * 5) % 17) as f64 / 17.0);
        let y = Vector::from_fn(n, |i, _| (x[(i, 0)] * 3.0).sin() + x[(i, 1)]);
        (x, y)
    }

    #[test]
    fn normal_equations_hold() {
        let (x, y) = data(30);
        for (hidden, ridge) in [(10, 1e-3), (50, 1e-2), (30, 0.5)] {
            let m = ElmModel::fit(&x, &y, hidden, ridge, Activation::Tanh, 1).unwrap();
            let h = m.hidden_matrix(&x);
            let beta = Vector::from_column_slice(&m.output_weights);
            let lhs = (h.transpose() * &h + Matrix::identity(hidden, hidden) * ridge) * &beta;
            let rhs = h.transpose() * &y;
            assert!((lhs - rhs).amax() <= 1e-8);
        }
    }

    #[test]
    fn wide_layer_interpolates() {
        let n = 10;
        let x = Matrix::from_fn(n, 2, |i, j| {
            let k = if j == 0 { i } else { (i * 7) % n };
            4.0 * (k as f64 / (n - 1) as f64 - 0.5)
        });
        let y = Vector::from_fn(n, |i, _| (x[(i, 0)] * 3.0).sin() + x[(i, 1)]);
        for activation in [Activation::Sigmoid, Activation::Tanh] {
            let m = ElmModel::fit(&x, &y, 60, 1e-12, activation, 3).unwrap();
            // full row rank makes the least-squares solution an interpolant
            let sv = m.hidden_matrix(&x).svd(false, false).singular_values;
            assert!(sv.min() > 1e-6 * sv.max());
            let pred = m.predict(&x).unwrap();
            let rmse = ((pred - &y).norm_squared() / n as f64).sqrt();
            assert!(rmse <= 1e-6, "{activation:?} rmse {rmse}");
        }
    }

    #[test]
    fn heavy_ridge_shrinks_to_zero() {
        let (x, y) = data(25);
        let m = ElmModel::fit(&x, &y, 20, 1e12, Activation::Sigmoid, 3).unwrap();
        assert!(m.predict(&x).unwrap().amax() < 1e-6);
    }

    #[test]
    fn seeded() {
        let (x, y) = data(15);
        let a = ElmModel::fit(&x, &y, 8, 1e-3, Activation::Tanh, 9).unwrap();
        let b = ElmModel::fit(&x, &y, 8, 1e-3, Activation::Tanh, 9).unwrap();
        assert_eq!(a, b);
        assert!(ElmModel::fit(&x, &y, 0, 1e-3, Activation::Tanh, 9).is_err());
    }
}
