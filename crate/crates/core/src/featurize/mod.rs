//! Feature construction and the standardise → PCA → min-max chain.

mod construct;
mod minmax;
mod pca;
mod pipeline;
mod standardize;

pub use construct::{construct_features, construct_matrix, feature_labels, FEATURES};
pub use minmax::MinMaxScaler;
pub use pca::PcaModel;
pub use pipeline::{FeaturePipeline, PipelineOptions, DEFAULT_VARIANCE_THRESHOLD};
pub use standardize::{Standardizer, CONSTANT_SD};
