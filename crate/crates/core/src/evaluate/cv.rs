use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{make_folds, FoldPlan};
use super::metrics::MetricSet;
use crate::dataset::{CoPyrolysisRecord, YIELD_NAMES};
use crate::featurize::{FeaturePipeline, PipelineOptions};
use crate::linalg::Matrix;
use crate::models::{tune_on_matrix, ModelKind, Regressor, RegressorSpec, TuneOptions};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    /// Fit the feature pipeline once on every record instead of per fold.
    pub fit_on_all: bool,
    pub pipeline: PipelineOptions,
    /// Nested PSO tuning on each training partition.
    pub tuning: Option<TuneOptions>,
    /// Also report metrics in yield percent.
    pub raw_metrics: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            k: 5,
            seed: 0,
            fit_on_all: false,
            pipeline: PipelineOptions::default(),
            tuning: None,
            raw_metrics: false,
        }
    }
}

/// Where each fold's model specs come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    /// Defaults for the kind, sized to the fold's pipeline width.
    Default(ModelKind),
    /// One spec per output, used as given.
    Fixed(Vec<RegressorSpec>),
}

impl ModelSource {
    fn kind(&self) -> ModelKind {
        match self {
            ModelSource::Default(k) => *k,
            ModelSource::Fixed(specs) => specs[0].kind,
        }
    }

    fn templates(&self, width: usize, seed: u64) -> Vec<RegressorSpec> {
        match self {
            ModelSource::Default(k) => {
                vec![RegressorSpec::default_for(*k, width).with_seed(seed); 3]
            }
            ModelSource::Fixed(specs) => specs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Per output, on normalised targets.
    pub train: Vec<MetricSet>,
    pub test: Vec<MetricSet>,
    /// Per output, in yield percent, when requested.
    pub raw_train: Option<Vec<MetricSet>>,
    pub raw_test: Option<Vec<MetricSet>>,
    pub specs: Vec<RegressorSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    /// Over folds where R² is defined; `None` if it never is.
    pub r2_mean: Option<f64>,
    pub r2_sd: Option<f64>,
    pub mae_mean: f64,
    pub mae_sd: f64,
    pub rmse_mean: f64,
    pub rmse_sd: f64,
}

impl MetricSummary {
    fn of(sets: &[MetricSet]) -> Self {
        let r2: Vec<f64> = sets.iter().filter_map(|m| m.r2).collect();
        let mae: Vec<f64> = sets.iter().map(|m| m.mae).collect();
        let rmse: Vec<f64> = sets.iter().map(|m| m.rmse).collect();
        MetricSummary {
            r2_mean: (!r2.is_empty()).then(|| mean(&r2)),
            r2_sd: (!r2.is_empty()).then(|| sd(&r2)),
            mae_mean: mean(&mae),
            mae_sd: sd(&mae),
            rmse_mean: mean(&rmse),
            rmse_sd: sd(&rmse),
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation; 0 for a single value.
fn sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSummary {
    pub output: String,
    pub train: MetricSummary,
    pub test: MetricSummary,
    pub raw_train: Option<MetricSummary>,
    pub raw_test: Option<MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub kind: ModelKind,
    pub k: usize,
    pub seed: u64,
    pub fold_fingerprint: String,
    pub options: CvOptions,
    pub folds: Vec<FoldResult>,
    pub outputs: Vec<OutputSummary>,
}

impl CvReport {
    /// Mean test R² averaged over the three outputs.
    pub fn mean_test_r2(&self) -> Option<f64> {
        let v: Option<Vec<f64>> = self.outputs.iter().map(|o| o.test.r2_mean).collect();
        v.map(|v| mean(&v))
    }

    pub fn mean_test_rmse(&self) -> f64 {
        mean(&self.outputs.iter().map(|o| o.test.rmse_mean).collect::<Vec<_>>())
    }

    /// Flat per-fold table: `fold,phase,units,output,r2,mae,rmse`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fold,phase,units,output,r2,mae,rmse\n");
        let mut line = |fold: usize, phase: &str, units: &str, sets: &[MetricSet]| {
            for (o, m) in sets.iter().enumerate() {
                let r2 = m.r2.map_or(String::new(), |v| v.to_string());
                out.push_str(&format!(
                    "{},{phase},{units},{},{r2},{},{}\n",
                    fold + 1,
                    YIELD_NAMES[o],
                    m.mae,
                    m.rmse
                ));
            }
        };
        for f in &self.folds {
            line(f.fold, "train", "normalized", &f.train);
            line(f.fold, "test", "normalized", &f.test);
            if let (Some(tr), Some(te)) = (&f.raw_train, &f.raw_test) {
                line(f.fold, "train", "percent", tr);
                line(f.fold, "test", "percent", te);
            }
        }
        out
    }
}

pub fn cross_validate(
    kind: ModelKind,
    records: &[CoPyrolysisRecord],
    options: &CvOptions,
) -> Result<CvReport> {
    let plan = make_folds(records.len(), options.k, options.seed)?;
    cross_validate_with(records, &plan, &ModelSource::Default(kind), options)
}

/// Cross-validate on an explicit fold plan.
pub fn cross_validate_with(
    records: &[CoPyrolysisRecord],
    plan: &FoldPlan,
    source: &ModelSource,
    options: &CvOptions,
) -> Result<CvReport> {
    if plan.n != records.len() {
        return Err(Error::LengthMismatch(plan.n, records.len()));
    }
    if let ModelSource::Fixed(specs) = source {
        if specs.len() != 3 {
            return Err(Error::LengthMismatch(3, specs.len()));
        }
    }
    let global = if options.fit_on_all {
        Some(FeaturePipeline::fit(records, options.pipeline)?)
    } else {
        None
    };
    let folds = (0..plan.k())
        .into_par_iter()
        .map(|fold| {
            run_fold(records, plan, fold, source, options, global.as_ref()).map_err(|e| {
                Error::Fold {
                    fold,
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = (0..3)
        .map(|o| {
            let pick = |f: &dyn Fn(&FoldResult) -> Option<MetricSet>| {
                folds.iter().filter_map(f).collect::<Vec<_>>()
            };
            let raw = |sets: Vec<MetricSet>| (!sets.is_empty()).then(|| MetricSummary::of(&sets));
            OutputSummary {
                output: YIELD_NAMES[o].to_string(),
                train: MetricSummary::of(&pick(&|f| Some(f.train[o]))),
                test: MetricSummary::of(&pick(&|f| Some(f.test[o]))),
                raw_train: raw(pick(&|f| f.raw_train.as_ref().map(|v| v[o]))),
                raw_test: raw(pick(&|f| f.raw_test.as_ref().map(|v| v[o]))),
            }
        })
        .collect();
    Ok(CvReport {
        kind: source.kind(),
        k: plan.k(),
        seed: plan.seed,
        fold_fingerprint: plan.fingerprint(),
        options: *options,
        folds,
        outputs,
    })
}

fn run_fold(
    records: &[CoPyrolysisRecord],
    plan: &FoldPlan,
    fold: usize,
    source: &ModelSource,
    options: &CvOptions,
    global: Option<&FeaturePipeline>,
) -> Result<FoldResult> {
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    let train: Vec<CoPyrolysisRecord> = train_idx.iter().map(|&i| records[i].clone()).collect();
    let test: Vec<CoPyrolysisRecord> = test_idx.iter().map(|&i| records[i].clone()).collect();
    let pipe = match global {
        Some(p) => p.clone(),
        None => FeaturePipeline::fit(&train, options.pipeline)?,
    };
    let (x_train, y_train) = pipe.transform(&train)?;
    let (x_test, y_test) = pipe.transform(&test)?;
    let templates = source.templates(pipe.width(), options.seed);

    let mut result = FoldResult {
        fold,
        train_size: train.len(),
        test_size: test.len(),
        train: Vec::with_capacity(3),
        test: Vec::with_capacity(3),
        raw_train: options.raw_metrics.then(Vec::new),
        raw_test: options.raw_metrics.then(Vec::new),
        specs: Vec::with_capacity(3),
    };
    for (o, template) in templates.iter().enumerate() {
        let y = y_train.column(o).into_owned();
        let spec = match &options.tuning {
            Some(t) => {
                let tune = TuneOptions {
                    seed: rng::substream_seed(options.seed, &format!("cv.tune.{fold}.{o}")),
                    ..*t
                };
                let mut tuned = tune_on_matrix(template, &x_train, &y, &tune)?.spec;
                tuned.seed = template.seed;
                tuned
            }
            None => template.clone(),
        };
        let model = Regressor::fit(&spec, &x_train, &y)?;
        let fit_train = model.predict(&x_train)?;
        let fit_test = model.predict(&x_test)?;
        let truth_test: Vec<f64> = y_test.column(o).iter().copied().collect();
        result.train.push(MetricSet::compute(y.as_slice(), fit_train.as_slice())?);
        result.test.push(MetricSet::compute(&truth_test, fit_test.as_slice())?);
        if options.raw_metrics {
            let raw = |m: &Matrix, idx: usize| -> Vec<f64> {
                m.column(idx).iter().map(|v| pipe.denormalize_target(o, *v)).collect()
            };
            let pt: Vec<f64> = fit_train.iter().map(|v| pipe.denormalize_target(o, *v)).collect();
            let pv: Vec<f64> = fit_test.iter().map(|v| pipe.denormalize_target(o, *v)).collect();
            let rt = raw(&y_train, o);
            let rv = raw(&y_test, o);
            if let Some(v) = result.raw_train.as_mut() {
                v.push(MetricSet::compute(&rt, &pt)?);
            }
            if let Some(v) = result.raw_test.as_mut() {
                v.push(MetricSet::compute(&rv, &pv)?);
            }
        }
        result.specs.push(spec);
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub kind: ModelKind,
    /// `(kind, mean test R², mean test RMSE)`, best first.
    pub ranking: Vec<(ModelKind, Option<f64>, f64)>,
    pub fold_fingerprint: String,
}

/// Rank reports by mean test R² over the three outputs, then lower mean test
/// RMSE, then kind name.
pub fn select_best(reports: &[CvReport]) -> Result<Selection> {
    if reports.len() < 2 {
        return Err(Error::InvalidConfig(
            "model selection needs at least two reports".into(),
        ));
    }
    let fp = &reports[0].fold_fingerprint;
    if reports.iter().any(|r| &r.fold_fingerprint != fp) {
        return Err(Error::FoldPlanMismatch);
    }
    let mut ranking: Vec<(ModelKind, Option<f64>, f64)> = reports
        .iter()
        .map(|r| (r.kind, r.mean_test_r2(), r.mean_test_rmse()))
        .collect();
    ranking.sort_by(|a, b| {
        let ra = a.1.unwrap_or(f64::NEG_INFINITY);
        let rb = b.1.unwrap_or(f64::NEG_INFINITY);
        rb.total_cmp(&ra)
            .then(a.2.total_cmp(&b.2))
            .then(a.0.name().cmp(b.0.name()))
    });
    Ok(Selection {
        kind: ranking[0].0,
        ranking,
        fold_fingerprint: fp.clone(),
    })
}
