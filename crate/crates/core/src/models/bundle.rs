//! A fitted pipeline with one model per output, saved as versioned JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spec::{ModelKind, RegressorSpec};
use super::tune::{tune_on_matrix, TuneOptions};
use super::Regressor;
use crate::dataset::{CoPyrolysisRecord, RAW_INPUTS};
use crate::featurize::{FeaturePipeline, PipelineOptions};
use crate::linalg::Matrix;
use crate::{Error, Result};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedBundle {
    pub format_version: u32,
    pub pipeline: FeaturePipeline,
    pub pipeline_fingerprint: String,
    /// Specs and models in output order: oil, char, syngas.
    pub specs: Vec<RegressorSpec>,
    pub models: Vec<Regressor>,
    /// Per raw input column, over the training records.
    pub input_lo: Vec<f64>,
    pub input_hi: Vec<f64>,
    pub input_median: Vec<f64>,
}

impl TrainedBundle {
    pub fn train(
        records: &[CoPyrolysisRecord],
        specs: &[RegressorSpec],
        pipeline: PipelineOptions,
    ) -> Result<Self> {
        if specs.len() != 3 {
            return Err(Error::LengthMismatch(3, specs.len()));
        }
        let pipe = FeaturePipeline::fit(records, pipeline)?;
        let (x, targets) = pipe.transform(records)?;
        let models = specs
            .iter()
            .enumerate()
            .map(|(o, spec)| Regressor::fit(spec, &x, &targets.column(o).into_owned()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrainedBundle::assemble(records, pipe, specs.to_vec(), models))
    }

    /// Default specs for `kind`, tuned per output when `tuning` is given.
    pub fn train_kind(
        kind: ModelKind,
        records: &[CoPyrolysisRecord],
        pipeline: PipelineOptions,
        tuning: Option<&TuneOptions>,
        seed: u64,
    ) -> Result<Self> {
        let pipe = FeaturePipeline::fit(records, pipeline)?;
        let (x, targets) = pipe.transform(records)?;
        let template = RegressorSpec::default_for(kind, x.ncols()).with_seed(seed);
        let mut specs = Vec::with_capacity(3);
        let mut models = Vec::with_capacity(3);
        for o in 0..3 {
            let y = targets.column(o).into_owned();
            let spec = match tuning {
                Some(t) => tune_on_matrix(&template, &x, &y, t)?.spec,
                None => template.clone(),
            };
            models.push(Regressor::fit(&spec, &x, &y)?);
            specs.push(spec);
        }
        Ok(TrainedBundle::assemble(records, pipe, specs, models))
    }

    fn assemble(
        records: &[CoPyrolysisRecord],
        pipeline: FeaturePipeline,
        specs: Vec<RegressorSpec>,
        models: Vec<Regressor>,
    ) -> Self {
        let columns: Vec<Vec<f64>> = (0..RAW_INPUTS)
            .map(|j| {
                let mut c: Vec<f64> = records.iter().map(|r| r.raw_inputs()[j]).collect();
                c.sort_by(f64::total_cmp);
                c
            })
            .collect();
        TrainedBundle {
            format_version: BUNDLE_FORMAT_VERSION,
            pipeline_fingerprint: pipeline.fingerprint(),
            pipeline,
            specs,
            models,
            input_lo: columns.iter().map(|c| c[0]).collect(),
            input_hi: columns.iter().map(|c| c[c.len() - 1]).collect(),
            input_median: columns
                .iter()
                .map(|c| crate::dataset::quantile(c, 0.5))
                .collect(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.models[0].kind()
    }

    /// Structural checks run after loading.
    pub fn check(&self) -> Result<()> {
        if self.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported bundle format version {}",
                self.format_version
            )));
        }
        self.pipeline.check_fingerprint(&self.pipeline_fingerprint)?;
        if self.models.len() != 3 || self.specs.len() != 3 {
            return Err(Error::Format("bundle needs exactly three models".into()));
        }
        for m in &self.models {
            if m.input_width() != self.pipeline.width() {
                return Err(Error::PipelineMismatch(format!(
                    "model expects {} inputs, pipeline yields {}",
                    m.input_width(),
                    self.pipeline.width()
                )));
            }
        }
        for v in [&self.input_lo, &self.input_hi, &self.input_median] {
            if v.len() != RAW_INPUTS {
                return Err(Error::LengthMismatch(RAW_INPUTS, v.len()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bundle: TrainedBundle = serde_json::from_str(text)?;
        bundle.check()?;
        Ok(bundle)
    }

    pub fn load(path: &Path) -> Result<Self> {
        TrainedBundle::from_json(&std::fs::read_to_string(path)?)
    }

    /// Predicted yields in percent for raw 20-column input rows.
    pub fn predict_raw_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<[f64; 3]>> {
        for r in rows {
            if r.len() != RAW_INPUTS {
                return Err(Error::LengthMismatch(RAW_INPUTS, r.len()));
            }
        }
        let records: Vec<CoPyrolysisRecord> = rows
            .iter()
            .map(|r| CoPyrolysisRecord::from_raw_inputs("query", r))
            .collect();
        self.predict_records(&records)
    }

    pub fn predict_raw(&self, row: &[f64]) -> Result<[f64; 3]> {
        Ok(self.predict_raw_batch(&[row.to_vec()])?[0])
    }

    pub fn predict_records(&self, records: &[CoPyrolysisRecord]) -> Result<Vec<[f64; 3]>> {
        let x: Matrix = self.pipeline.transform_inputs(records)?;
        let mut out = vec![[0.0; 3]; records.len()];
        for (o, model) in self.models.iter().enumerate() {
            let pred = model.predict(&x)?;
            for (slot, p) in out.iter_mut().zip(pred.iter()) {
                slot[o] = self.pipeline.denormalize_target(o, *p);
            }
        }
        Ok(out)
    }
}
