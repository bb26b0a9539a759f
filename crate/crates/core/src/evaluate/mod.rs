//! k-fold cross-validation, regression metrics and model selection.

mod cv;
mod folds;
mod metrics;

pub use cv::{
    cross_validate, cross_validate_with, select_best, CvOptions, CvReport, FoldResult,
    MetricSummary, ModelSource, OutputSummary, Selection,
};
pub use folds::{make_folds, FoldPlan};
pub use metrics::{mae, r2, rmse, MetricSet};
