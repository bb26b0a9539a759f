//! Surrogate modelling and swarm optimisation for biomass/polymer co-pyrolysis.
//!
//! The crate is organised along the processing chain:
//!
//! - [`dataset`]: experiment records, CSV ingestion, summaries and a synthetic generator
//! - [`featurize`]: blend-weighted feature construction, standardisation, PCA and min-max scaling
//! - [`models`]: GPR, ELM, MLP, SVR and GAM regressors plus PSO hyperparameter tuning
//! - [`evaluate`]: k-fold cross-validation, regression metrics and model selection
//! - [`evolve`]: single-objective PSO, MOPSO with a Pareto archive, and the yield optimiser
//! - [`analyze`]: Spearman correlation, van Krevelen ratios and contour grids
//! - [`config`]: strict `key = value` run configuration

pub mod analyze;
pub mod config;
pub mod dataset;
pub mod error;
pub mod evaluate;
pub mod evolve;
pub mod featurize;
pub mod linalg;
pub mod models;
pub mod rng;

pub use error::{Error, Result};
