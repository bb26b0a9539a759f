//! Run configuration read from `key = value` lines.
//!
//! Blank lines and `#` comments are ignored. Every key must be one of
//! [`KEYS`]; anything else is rejected so that typos cannot silently fall back
//! to defaults.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::evaluate::CvOptions;
use crate::evolve::{MopsoConfig, PsoConfig};
use crate::featurize::PipelineOptions;
use crate::models::TuneOptions;
use crate::rng;
use crate::{Error, Result};

pub const KEYS: [&str; 23] = [
    "seed",
    "threads",
    "pso.swarm_size",
    "pso.iterations",
    "pso.inertia",
    "pso.cognitive",
    "pso.social",
    "pso.velocity_cap",
    "mopso.archive_capacity",
    "mopso.mutation_probability",
    "cv.k",
    "cv.fit_on_all",
    "cv.raw_metrics",
    "tune.enabled",
    "tune.swarm_size",
    "tune.iterations",
    "tune.inner_k",
    "pipeline.standardize",
    "pipeline.variance_threshold",
    "synth.n",
    "synth.noise_sd",
    "contour.steps",
    "model.kind",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub pso: PsoConfig,
    pub mopso_archive_capacity: usize,
    pub mopso_mutation_probability: f64,
    pub cv_k: usize,
    pub cv_fit_on_all: bool,
    pub cv_raw_metrics: bool,
    pub tune_enabled: bool,
    pub tune_swarm_size: usize,
    pub tune_iterations: usize,
    pub tune_inner_k: usize,
    pub pipeline: PipelineOptions,
    pub synth_n: usize,
    pub synth_noise_sd: f64,
    pub contour_steps: usize,
    pub model_kind: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mopso = MopsoConfig::default();
        let tune = TuneOptions::default();
        RunConfig {
            seed: 42,
            threads: 0,
            pso: PsoConfig::default(),
            mopso_archive_capacity: mopso.archive_capacity,
            mopso_mutation_probability: mopso.mutation_probability,
            cv_k: 5,
            cv_fit_on_all: false,
            cv_raw_metrics: false,
            tune_enabled: true,
            tune_swarm_size: tune.pso.swarm_size,
            tune_iterations: tune.pso.iterations,
            tune_inner_k: tune.inner_k,
            pipeline: PipelineOptions::default(),
            synth_n: 300,
            synth_noise_sd: 0.02,
            contour_steps: 25,
            model_kind: "gpr".into(),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| Error::TypeError {
        key: key.to_string(),
        message: format!("`{value}`: {e}"),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("config line {}: expected `key = value`", n + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse_value(key, value)?,
            "threads" => self.threads = parse_value(key, value)?,
            "pso.swarm_size" => self.pso.swarm_size = parse_value(key, value)?,
            "pso.iterations" => self.pso.iterations = parse_value(key, value)?,
            "pso.inertia" => self.pso.inertia = parse_value(key, value)?,
            "pso.cognitive" => self.pso.cognitive = parse_value(key, value)?,
            "pso.social" => self.pso.social = parse_value(key, value)?,
            "pso.velocity_cap" => self.pso.velocity_cap = parse_value(key, value)?,
            "mopso.archive_capacity" => self.mopso_archive_capacity = parse_value(key, value)?,
            "mopso.mutation_probability" => {
                self.mopso_mutation_probability = parse_value(key, value)?
            }
            "cv.k" => self.cv_k = parse_value(key, value)?,
            "cv.fit_on_all" => self.cv_fit_on_all = parse_value(key, value)?,
            "cv.raw_metrics" => self.cv_raw_metrics = parse_value(key, value)?,
            "tune.enabled" => self.tune_enabled = parse_value(key, value)?,
            "tune.swarm_size" => self.tune_swarm_size = parse_value(key, value)?,
            "tune.iterations" => self.tune_iterations = parse_value(key, value)?,
            "tune.inner_k" => self.tune_inner_k = parse_value(key, value)?,
            "pipeline.standardize" => self.pipeline.standardize = parse_value(key, value)?,
            "pipeline.variance_threshold" => {
                self.pipeline.variance_threshold = parse_value(key, value)?
            }
            "synth.n" => self.synth_n = parse_value(key, value)?,
            "synth.noise_sd" => self.synth_noise_sd = parse_value(key, value)?,
            "contour.steps" => self.contour_steps = parse_value(key, value)?,
            "model.kind" => {
                let kind: crate::models::ModelKind = parse_value(key, value)?;
                self.model_kind = kind.name().to_string();
            }
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Every key with its resolved value, in [`KEYS`] order.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let values = [
            self.seed.to_string(),
            self.threads.to_string(),
            self.pso.swarm_size.to_string(),
            self.pso.iterations.to_string(),
            self.pso.inertia.to_string(),
            self.pso.cognitive.to_string(),
            self.pso.social.to_string(),
            self.pso.velocity_cap.to_string(),
            self.mopso_archive_capacity.to_string(),
            self.mopso_mutation_probability.to_string(),
            self.cv_k.to_string(),
            self.cv_fit_on_all.to_string(),
            self.cv_raw_metrics.to_string(),
            self.tune_enabled.to_string(),
            self.tune_swarm_size.to_string(),
            self.tune_iterations.to_string(),
            self.tune_inner_k.to_string(),
            self.pipeline.standardize.to_string(),
            self.pipeline.variance_threshold.to_string(),
            self.synth_n.to_string(),
            self.synth_noise_sd.to_string(),
            self.contour_steps.to_string(),
            self.model_kind.clone(),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.pso_config().validate()?;
        self.mopso_config().validate()?;
        self.tune_options().pso.validate()?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.cv_k < 2 {
            return bad(format!("cv.k must be at least 2, got {}", self.cv_k));
        }
        if self.tune_inner_k < 2 {
            return bad(format!("tune.inner_k must be at least 2, got {}", self.tune_inner_k));
        }
        let t = self.pipeline.variance_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return bad(format!("pipeline.variance_threshold must lie in (0, 1], got {t}"));
        }
        if self.contour_steps < 2 {
            return bad(format!("contour.steps must be at least 2, got {}", self.contour_steps));
        }
        if !(self.synth_noise_sd >= 0.0) {
            return bad(format!("synth.noise_sd must be non-negative, got {}", self.synth_noise_sd));
        }
        Ok(())
    }

    /// Single-objective PSO settings seeded from the root seed.
    pub fn pso_config(&self) -> PsoConfig {
        PsoConfig {
            seed: rng::substream_seed(self.seed, "pso"),
            ..self.pso
        }
    }

    pub fn mopso_config(&self) -> MopsoConfig {
        MopsoConfig {
            pso: PsoConfig {
                seed: rng::substream_seed(self.seed, "mopso"),
                ..self.pso
            },
            archive_capacity: self.mopso_archive_capacity,
            mutation_probability: self.mopso_mutation_probability,
        }
    }

    pub fn tune_options(&self) -> TuneOptions {
        TuneOptions {
            pso: PsoConfig {
                swarm_size: self.tune_swarm_size,
                iterations: self.tune_iterations,
                ..self.pso
            },
            inner_k: self.tune_inner_k,
            seed: rng::substream_seed(self.seed, "tune"),
        }
    }

    pub fn cv_options(&self) -> CvOptions {
        CvOptions {
            k: self.cv_k,
            seed: self.seed,
            fit_on_all: self.cv_fit_on_all,
            pipeline: self.pipeline,
            tuning: self.tune_enabled.then(|| self.tune_options()),
            raw_metrics: self.cv_raw_metrics,
        }
    }
}
