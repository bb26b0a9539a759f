//! PSO search over the free hyperparameters of a [`RegressorSpec`].
//!
//! Free hyperparameters are searched in their encoded coordinates (log10 for
//! log-scaled ones); pinned ones keep their value.

use serde::{Deserialize, Serialize};

use super::spec::{ModelKind, RegressorSpec};
use super::Regressor;
use crate::dataset::CoPyrolysisRecord;
use crate::evaluate::{make_folds, rmse};
use crate::evolve::{pso_minimize, Bounds, PsoConfig};
use crate::featurize::{FeaturePipeline, PipelineOptions};
use crate::linalg::{Matrix, Vector};
use crate::rng;
use crate::Result;

/// Objective value assigned to hyperparameters whose fit fails.
pub const FAILED_FIT_PENALTY: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneOptions {
    pub pso: PsoConfig,
    /// Inner folds on the training partition.
    pub inner_k: usize,
    pub seed: u64,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            pso: PsoConfig {
                swarm_size: 10,
                iterations: 10,
                ..PsoConfig::default()
            },
            inner_k: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub spec: RegressorSpec,
    pub objective: f64,
    pub evaluations: usize,
}

/// Minimise `objective` over the free hyperparameters of `template`.
pub fn tune_with_objective<F>(
    template: &RegressorSpec,
    objective: F,
    pso: &PsoConfig,
) -> Result<TuneResult>
where
    F: Fn(&RegressorSpec) -> f64 + Sync,
{
    template.validate()?;
    let free: Vec<usize> = (0..template.hyperparameters.len())
        .filter(|&i| template.hyperparameters[i].is_free())
        .collect();
    let decode = |coords: &[f64]| {
        let mut spec = template.clone();
        for (&i, c) in free.iter().zip(coords) {
            let h = &mut spec.hyperparameters[i];
            h.value = h.decode(*c);
        }
        spec
    };
    let score = |spec: &RegressorSpec| {
        let v = objective(spec);
        if v.is_finite() {
            v
        } else {
            FAILED_FIT_PENALTY
        }
    };
    if free.is_empty() {
        let v = score(template);
        return Ok(TuneResult {
            spec: template.clone(),
            objective: v,
            evaluations: 1,
        });
    }
    let bounds = Bounds::new(
        free.iter()
            .map(|&i| {
                let h = &template.hyperparameters[i];
                h.encode(h.lo)
            })
            .collect(),
        free.iter()
            .map(|&i| {
                let h = &template.hyperparameters[i];
                h.encode(h.hi)
            })
            .collect(),
    )?;
    let result = pso_minimize(|c| score(&decode(c)), &bounds, pso)?;
    Ok(TuneResult {
        spec: decode(&result.best_position),
        objective: result.best_value,
        evaluations: result.evaluations,
    })
}

/// Mean held-out RMSE of `spec` over `k` folds of `(x, y)`, summed in fold
/// order. Failed fits score [`FAILED_FIT_PENALTY`].
pub fn cv_rmse(spec: &RegressorSpec, x: &Matrix, y: &Vector, k: usize, seed: u64) -> f64 {
    let Ok(plan) = make_folds(x.nrows(), k.min(x.nrows()), seed) else {
        return FAILED_FIT_PENALTY;
    };
    let mut total = 0.0;
    for fold in 0..plan.k() {
        let train = plan.train_indices(fold);
        let test = plan.test_indices(fold);
        let xt = x.select_rows(train.iter());
        let yt = y.select_rows(train.iter());
        let fitted = Regressor::fit(spec, &xt, &yt)
            .and_then(|m| m.predict(&x.select_rows(test.iter())));
        let pred = match fitted {
            Ok(p) => p,
            Err(_) => return FAILED_FIT_PENALTY,
        };
        let truth: Vec<f64> = test.iter().map(|&i| y[i]).collect();
        match rmse(&truth, pred.as_slice()) {
            Ok(v) if v.is_finite() => total += v,
            _ => return FAILED_FIT_PENALTY,
        }
    }
    total / plan.k() as f64
}

/// Tune `template` on an already transformed design matrix.
pub fn tune_on_matrix(
    template: &RegressorSpec,
    x: &Matrix,
    y: &Vector,
    options: &TuneOptions,
) -> Result<TuneResult> {
    let fold_seed = rng::substream_seed(options.seed, "tune.folds");
    let pso = PsoConfig {
        seed: rng::substream_seed(options.seed, "tune.pso"),
        ..options.pso
    };
    tune_with_objective(
        template,
        |spec| cv_rmse(spec, x, y, options.inner_k, fold_seed),
        &pso,
    )
}

/// Fit the feature pipeline on `records` and tune a `kind` model for one
/// output column (0 oil, 1 char, 2 syngas).
pub fn tune_hyperparameters(
    kind: ModelKind,
    records: &[CoPyrolysisRecord],
    output: usize,
    pipeline: PipelineOptions,
    options: &TuneOptions,
) -> Result<TuneResult> {
    let pipe = FeaturePipeline::fit(records, pipeline)?;
    let (x, targets) = pipe.transform(records)?;
    let y = targets.column(output).into_owned();
    let template = RegressorSpec::default_for(kind, x.ncols()).with_seed(options.seed);
    tune_on_matrix(&template, &x, &y, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn gpr_like() -> RegressorSpec {
        RegressorSpec::default_for(ModelKind::Svr, 1)
    }

    #[test]
    fn convex_surface_argmin() {
        // quadratic in log10(c) and gamma's log, minimum at c = 10, gamma = 0.2
        let template = gpr_like();
        let objective = |s: &RegressorSpec| {
            let c = s.get("c").unwrap().log10();
            let g = s.get("gamma").unwrap().log10();
            let e = s.get("epsilon").unwrap();
            (c - 1.0).powi(2) + (g - 0.2f64.log10()).powi(2) + (e - 0.05).powi(2)
        };
        let pso = PsoConfig {
            swarm_size: 20,
            iterations: 100,
            seed: 5,
            ..PsoConfig::default()
        };
        let result = tune_with_objective(&template, objective, &pso).unwrap();
        assert!((result.spec.get("c").unwrap().log10() - 1.0).abs() < 1e-2);
        assert!((result.spec.get("gamma").unwrap().log10() - 0.2f64.log10()).abs() < 1e-2);
        assert!((result.spec.get("epsilon").unwrap() - 0.05).abs() < 1e-2);
        assert!(result.evaluations <= 20 * 100);
    }

    #[test]
    fn collapsed_bounds_return_the_point() {
        let mut template = gpr_like();
        for name in ["c", "epsilon", "gamma"] {
            let v = template.get(name).unwrap();
            template.pin(name, v).unwrap();
        }
        let result =
            tune_with_objective(&template, |_| 3.0, &PsoConfig::default()).unwrap();
        assert_eq!(result.spec, template);
        assert_eq!(result.objective, 3.0);
        assert_eq!(result.evaluations, 1);
    }

    #[test]
    fn both_seeds_beat_random_search() {
        // shifted Rastrigin-like surface over the encoded SVR coordinates
        let template = gpr_like();
        let objective = |s: &RegressorSpec| {
            let z = [
                s.get("c").unwrap().log10() - 1.3,
                s.get("gamma").unwrap().log10() + 0.7,
                10.0 * (s.get("epsilon").unwrap() - 0.12),
            ];
            z.iter()
                .map(|v| v * v - 0.5 * (2.0 * std::f64::consts::PI * v).cos() + 0.5)
                .sum::<f64>()
        };
        let budget = PsoConfig {
            swarm_size: 10,
            iterations: 20,
            ..PsoConfig::default()
        };
        for seed in [1, 2] {
            let pso = PsoConfig { seed, ..budget };
            let tuned = tune_with_objective(&template, objective, &pso).unwrap();
            let mut r = rng::substream(seed, "random-search");
            let mut baseline = f64::INFINITY;
            for _ in 0..budget.evaluations() {
                let mut s = template.clone();
                for h in s.hyperparameters.iter_mut().filter(|h| h.is_free()) {
                    let c = r.random_range(h.encode(h.lo)..=h.encode(h.hi));
                    h.value = h.decode(c);
                }
                baseline = baseline.min(objective(&s));
            }
            assert!(tuned.objective <= baseline, "seed {seed}: {} vs {baseline}", tuned.objective);
        }
    }

    #[test]
    fn failed_fits_are_penalised() {
        let x = Matrix::from_fn(12, 1, |i, _| i as f64);
        let y = Vector::from_fn(12, |i, _| i as f64);
        let mut spec = RegressorSpec::default_for(ModelKind::Mlp, 1);
        spec.set("step", 0.5).unwrap();
        spec.pin("epochs", 1000.0).unwrap();
        let huge = Matrix::from_fn(12, 1, |i, _| 1e6 * i as f64);
        let score = cv_rmse(&spec, &huge, &(y.clone() * 1e6), 3, 0);
        assert_eq!(score, FAILED_FIT_PENALTY);
        let ok = cv_rmse(&RegressorSpec::default_for(ModelKind::Elm, 1), &x, &y, 3, 0);
        assert!(ok.is_finite() && ok < FAILED_FIT_PENALTY);
    }

    #[test]
    fn tuned_spec_stays_within_bounds() {
        let x = Matrix::from_fn(30, 2, |i, j| ((i * (j + 3)) % 17) as f64 / 16.0);
        let y = Vector::from_fn(30, |i, _| x[(i, 0)] - 0.5 * x[(i, 1)]);
        let template = RegressorSpec::default_for(ModelKind::Gpr, 2);
        let options = TuneOptions {
            pso: PsoConfig {
                swarm_size: 4,
                iterations: 3,
                ..PsoConfig::default()
            },
            ..TuneOptions::default()
        };
        let a = tune_on_matrix(&template, &x, &y, &options).unwrap();
        let b = tune_on_matrix(&template, &x, &y, &options).unwrap();
        assert_eq!(a, b);
        a.spec.validate().unwrap();
        assert!(a.evaluations <= 12);
    }
}
