//! Fully connected feed-forward network with a linear output unit, trained by
//! plain mini-batch gradient descent on `½·mean((ŷ − y)²)`.

use rand::seq::SliceRandom;
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
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Relu, Activation::Sigmoid, Activation::Tanh];

    fn apply(&self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-v).exp()),
            Activation::Tanh => v.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(&self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpTraining {
    pub epochs: usize,
    pub step: f64,
    pub batch: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `outputs × inputs`, row-major.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub inputs: usize,
    pub outputs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub activation: Activation,
    pub layers: Vec<Layer>,
    pub training: MlpTraining,
    /// Full-batch loss after each epoch.
    pub loss_history: Vec<f64>,
}

/// Scratch buffers reused across samples.
struct Workspace {
    pre: Vec<Vec<f64>>,
    act: Vec<Vec<f64>>,
    delta: Vec<f64>,
    next: Vec<f64>,
    /// Start of each layer's parameters in the flat gradient.
    offsets: Vec<usize>,
}

impl Workspace {
    fn new(model: &MlpModel) -> Self {
        let mut offsets = Vec::with_capacity(model.layers.len());
        let mut k = 0;
        for l in &model.layers {
            offsets.push(k);
            k += l.weights.len() + l.biases.len();
        }
        Workspace {
            pre: model.layers.iter().map(|l| vec![0.0; l.outputs]).collect(),
            act: model.layers.iter().map(|l| vec![0.0; l.outputs]).collect(),
            delta: Vec::new(),
            next: Vec::new(),
            offsets,
        }
    }
}

impl MlpModel {
    /// Xavier-uniform weights, zero biases. `sizes` = input, hidden..., output(1).
    pub fn init(sizes: &[usize], activation: Activation, seed: u64) -> Self {
        let mut r = rng::substream(seed, "mlp.init");
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (inputs, outputs) = (w[0], w[1]);
                let limit = (6.0 / (inputs + outputs) as f64).sqrt();
                Layer {
                    weights: (0..inputs * outputs)
                        .map(|_| r.random_range(-limit..limit))
                        .collect(),
                    biases: vec![0.0; outputs],
                    inputs,
                    outputs,
                }
            })
            .collect();
        MlpModel {
            activation,
            layers,
            training: MlpTraining {
                epochs: 0,
                step: 0.0,
                batch: 1,
                seed,
            },
            loss_history: Vec::new(),
        }
    }

    pub fn fit(
        x: &Matrix,
        y: &Vector,
        hidden: &[usize],
        activation: Activation,
        training: MlpTraining,
    ) -> Result<Self> {
        check_xy(x, y)?;
        if hidden.is_empty() || hidden.contains(&0) {
            return Err(Error::InvalidConfig("MLP needs non-empty hidden layers".into()));
        }
        if !(training.step > 0.0) || training.batch == 0 {
            return Err(Error::InvalidConfig("MLP step and batch must be positive".into()));
        }
        let mut sizes = vec![x.ncols()];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut model = MlpModel::init(&sizes, activation, training.seed);
        model.training = training;

        let rows: Vec<Vec<f64>> = (0..x.nrows())
            .map(|i| x.row(i).iter().copied().collect())
            .collect();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        let mut shuffle = rng::substream(training.seed, "mlp.shuffle");
        let mut grad = vec![0.0; model.parameter_count()];
        let mut ws = Workspace::new(&model);
        for epoch in 0..training.epochs {
            order.shuffle(&mut shuffle);
            for chunk in order.chunks(training.batch) {
                grad.iter_mut().for_each(|g| *g = 0.0);
                for &i in chunk {
                    model.accumulate_gradient(&rows[i], y[i], &mut grad, &mut ws);
                }
                let scale = training.step / chunk.len() as f64;
                let mut k = 0;
                for layer in &mut model.layers {
                    for w in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                        *w -= scale * grad[k];
                        k += 1;
                    }
                }
            }
            let loss = model.loss_rows(&rows, y, &mut ws);
            if !loss.is_finite() {
                return Err(Error::DivergedTraining { epoch });
            }
            model.loss_history.push(loss);
        }
        Ok(model)
    }

    pub fn fit_spec(x: &Matrix, y: &Vector, spec: &RegressorSpec) -> Result<Self> {
        let activation = match spec.get_or("activation", 2.0).round() as i64 {
            0 => Activation::Relu,
            1 => Activation::Sigmoid,
            _ => Activation::Tanh,
        };
        let width = spec.get("hidden")?.round() as usize;
        let layers = spec.get_or("layers", 1.0).round().max(1.0) as usize;
        MlpModel::fit(
            x,
            y,
            &vec![width; layers],
            activation,
            MlpTraining {
                epochs: spec.get("epochs")?.round() as usize,
                step: spec.get("step")?,
                batch: spec.get_or("batch", 16.0).round().max(1.0) as usize,
                seed: spec.seed,
            },
        )
    }

    pub fn input_width(&self) -> usize {
        self.layers.first().map_or(0, |l| l.inputs)
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// Parameters in layer order, weights before biases.
    pub fn parameters(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        let mut k = 0;
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                *w = params[k];
                k += 1;
            }
        }
    }

    /// Output for one input; per-layer pre-activations and activations are left in `ws`.
    fn forward(&self, x: &[f64], ws: &mut Workspace) -> f64 {
        let last = self.layers.len() - 1;
        for (li, layer) in self.layers.iter().enumerate() {
            let (done, rest) = ws.act.split_at_mut(li);
            let input: &[f64] = if li == 0 { x } else { &done[li - 1] };
            let out = &mut rest[0];
            let pre = &mut ws.pre[li];
            for o in 0..layer.outputs {
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                let z = layer.biases[o] + row.iter().zip(input).map(|(w, v)| w * v).sum::<f64>();
                pre[o] = z;
                out[o] = if li == last { z } else { self.activation.apply(z) };
            }
        }
        ws.act[last][0]
    }

    /// Adds the gradient of `½(ŷ − y)²` for one sample into `grad`.
    fn accumulate_gradient(&self, x: &[f64], y: f64, grad: &mut [f64], ws: &mut Workspace) {
        let out = self.forward(x, ws);
        let Workspace {
            pre,
            act,
            delta,
            next,
            offsets,
        } = ws;
        delta.clear();
        delta.push(out - y);
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let input: &[f64] = if li == 0 { x } else { &act[li - 1] };
            let base = offsets[li];
            for (o, d) in delta.iter().enumerate() {
                let g = &mut grad[base + o * layer.inputs..base + (o + 1) * layer.inputs];
                for (gi, v) in g.iter_mut().zip(input) {
                    *gi += d * v;
                }
                grad[base + layer.weights.len() + o] += d;
            }
            if li > 0 {
                next.clear();
                for i in 0..layer.inputs {
                    let s: f64 = delta
                        .iter()
                        .enumerate()
                        .map(|(o, d)| layer.weights[o * layer.inputs + i] * d)
                        .sum();
                    next.push(s * self.activation.derivative(pre[li - 1][i], act[li - 1][i]));
                }
                std::mem::swap(delta, next);
            }
        }
    }

    fn loss_rows(&self, rows: &[Vec<f64>], y: &Vector, ws: &mut Workspace) -> f64 {
        rows.iter()
            .zip(y.iter())
            .map(|(r, t)| 0.5 * (self.forward(r, ws) - t).powi(2))
            .sum::<f64>()
            / rows.len() as f64
    }

    /// Loss `½·mean((ŷ − y)²)` and its gradient w.r.t. [`parameters`](Self::parameters).
    pub fn loss_and_gradient(&self, x: &Matrix, y: &Vector) -> (f64, Vec<f64>) {
        let rows: Vec<Vec<f64>> = (0..x.nrows())
            .map(|i| x.row(i).iter().copied().collect())
            .collect();
        let mut ws = Workspace::new(self);
        let mut grad = vec![0.0; self.parameter_count()];
        for (r, t) in rows.iter().zip(y.iter()) {
            self.accumulate_gradient(r, *t, &mut grad, &mut ws);
        }
        let n = rows.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (self.loss_rows(&rows, y, &mut ws), grad)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vector> {
        check_width(self.input_width(), x)?;
        let mut ws = Workspace::new(self);
        Ok(Vector::from_iterator(
            x.nrows(),
            (0..x.nrows()).map(|i| {
                let row: Vec<f64> = x.row(i).iter().copied().collect();
                self.forward(&row, &mut ws)
            }),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::r2;

    #[test]
    fn gradient_matches_central_differences() {
        let mut r = rng::seeded(11);
        for activation in Activation::ALL {
            for trial in 0..4 {
                let sizes = [3, 4, 3, 1];
                let mut net = MlpModel::init(&sizes, activation, trial);
                // nudge biases off zero so ReLU kinks are not sampled
                let mut p = net.parameters();
                p.iter_mut().for_each(|v| *v += r.random_range(-0.3..0.3));
                net.set_parameters(&p);
                let x = Matrix::from_fn(6, 3, |_, _| r.random_range(-1.0..1.0));
                let y = Vector::from_fn(6, |_, _| r.random_range(-1.0..1.0));
                let (_, grad) = net.loss_and_gradient(&x, &y);
                let h = 1e-5;
                for k in 0..p.len() {
                    let mut plus = p.clone();
                    plus[k] += h;
                    let mut minus = p.clone();
                    minus[k] -= h;
                    net.set_parameters(&plus);
                    let lp = net.loss_and_gradient(&x, &y).0;
                    net.set_parameters(&minus);
                    let lm = net.loss_and_gradient(&x, &y).0;
                    let numeric = (lp - lm) / (2.0 * h);
                    let rel = (numeric - grad[k]).abs() / numeric.abs().max(grad[k].abs()).max(1e-6);
                    assert!(rel <= 1e-4, "{activation:?} param {k}: {numeric} vs {}", grad[k]);
                }
                net.set_parameters(&p);
            }
        }
    }

    #[test]
    fn learns_linear_map() {
        let x = Matrix::from_fn(50, 1, |i, _| i as f64 / 49.0);
        let y = Vector::from_fn(50, |i, _| 2.0 * x[(i, 0)]);
        let m = MlpModel::fit(
            &x,
            &y,
            &[8],
            Activation::Tanh,
            MlpTraining {
                epochs: 2000,
                step: 0.05,
                batch: 10,
                seed: 1,
            },
        )
        .unwrap();
        let pred = m.predict(&x).unwrap();
        let score = r2(y.as_slice(), pred.as_slice()).unwrap();
        assert!(score >= 0.99, "r2 {score}");
        // averaged-epoch loss is non-increasing within 1e-3
        let avg: Vec<f64> = m
            .loss_history
            .chunks(100)
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect();
        assert!(avg.windows(2).all(|w| w[1] <= w[0] + 1e-3));
        assert!(m.parameters().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn zero_epochs_reproduce_init() {
        let x = Matrix::from_fn(5, 2, |i, j| (i + j) as f64 / 7.0);
        let y = Vector::from_fn(5, |i, _| i as f64);
        let cfg = MlpTraining {
            epochs: 0,
            step: 0.1,
            batch: 2,
            seed: 4,
        };
        let a = MlpModel::fit(&x, &y, &[3], Activation::Relu, cfg).unwrap();
        let b = MlpModel::fit(&x, &y, &[3], Activation::Relu, cfg).unwrap();
        assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
        assert_eq!(
            a.parameters(),
            MlpModel::init(&[2, 3, 1], Activation::Relu, 4).parameters()
        );
    }

    #[test]
    fn divergence_is_reported() {
        let x = Matrix::from_fn(10, 1, |i, _| i as f64 * 100.0);
        let y = Vector::from_fn(10, |i, _| i as f64 * 1e3);
        let err = MlpModel::fit(
            &x,
            &y,
            &[4],
            Activation::Relu,
            MlpTraining {
                epochs: 1000,
                step: 10.0,
                batch: 10,
                seed: 0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::DivergedTraining { .. }));
    }
}
