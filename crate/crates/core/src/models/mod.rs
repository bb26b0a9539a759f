//! Surrogate regressors.
//!
//! Every model maps an `n × d` input matrix (normalised PCA scores) to one
//! output. Hyperparameters travel in a [`RegressorSpec`] so that the PSO tuner
//! can treat all kinds uniformly.

mod bundle;
mod elm;
mod gam;
mod gpr;
mod mlp;
mod spec;
mod svr;
mod tune;

pub use bundle::{TrainedBundle, BUNDLE_FORMAT_VERSION};
pub use elm::{Activation as ElmActivation, ElmModel};
pub use gam::{GamModel, ShapeFunction};
pub use gpr::{gpr_nlml, Basis, GprHyperparameters, GprModel, ARD_CAP};
pub use mlp::{Activation as MlpActivation, MlpModel, MlpTraining};
pub use spec::{Hyperparameter, ModelKind, RegressorSpec};
pub use svr::{gram_matrix, solve_dual, DualSolution, SvrKernel, SvrModel, SVR_TOLERANCE};
pub use tune::{
    cv_rmse, tune_hyperparameters, tune_on_matrix, tune_with_objective, TuneOptions, TuneResult,
    FAILED_FIT_PENALTY,
};

use serde::{Deserialize, Serialize};

use crate::linalg::{Matrix, Vector};
use crate::{Error, Result};

/// A fitted model of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Regressor {
    Gpr(GprModel),
    Elm(ElmModel),
    Mlp(MlpModel),
    Svr(SvrModel),
    Gam(GamModel),
}

impl Regressor {
    pub fn fit(spec: &RegressorSpec, x: &Matrix, y: &Vector) -> Result<Self> {
        spec.validate()?;
        check_xy(x, y)?;
        Ok(match spec.kind {
            ModelKind::Gpr => Regressor::Gpr(GprModel::fit(
                x,
                y,
                &GprHyperparameters::from_spec(spec, x.ncols())?,
            )?),
            ModelKind::Elm => Regressor::Elm(ElmModel::fit_spec(x, y, spec)?),
            ModelKind::Mlp => Regressor::Mlp(MlpModel::fit_spec(x, y, spec)?),
            ModelKind::Svr => Regressor::Svr(SvrModel::fit_spec(x, y, spec)?),
            ModelKind::Gam => Regressor::Gam(GamModel::fit_spec(x, y, spec)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Regressor::Gpr(_) => ModelKind::Gpr,
            Regressor::Elm(_) => ModelKind::Elm,
            Regressor::Mlp(_) => ModelKind::Mlp,
            Regressor::Svr(_) => ModelKind::Svr,
            Regressor::Gam(_) => ModelKind::Gam,
        }
    }

    pub fn input_width(&self) -> usize {
        match self {
            Regressor::Gpr(m) => m.input_width(),
            Regressor::Elm(m) => m.input_width(),
            Regressor::Mlp(m) => m.input_width(),
            Regressor::Svr(m) => m.input_width(),
            Regressor::Gam(m) => m.input_width(),
        }
    }

    /// Point predictions (posterior mean for GPR).
    pub fn predict(&self, x: &Matrix) -> Result<Vector> {
        match self {
            Regressor::Gpr(m) => m.predict_mean(x),
            Regressor::Elm(m) => m.predict(x),
            Regressor::Mlp(m) => m.predict(x),
            Regressor::Svr(m) => m.predict(x),
            Regressor::Gam(m) => m.predict(x),
        }
    }
}

pub(crate) fn check_xy(x: &Matrix, y: &Vector) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            got: y.len(),
        });
    }
    if x.nrows() == 0 {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Format("non-finite training value".into()));
    }
    Ok(())
}

pub(crate) fn check_width(expected: usize, x: &Matrix) -> Result<()> {
    if x.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: x.ncols(),
        });
    }
    Ok(())
}
