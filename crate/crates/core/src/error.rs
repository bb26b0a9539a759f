use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: column `{column}` is not a number: {value:?}")]
    MalformedNumber {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: `{field}` = {value} violates its range: {reason}")]
    RangeViolation {
        row: usize,
        field: String,
        value: f64,
        reason: String,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("record `{0}` has no yields but is used for training")]
    MissingYields(String),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("matrix has no variance")]
    DegenerateMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel matrix is not positive definite (jitter up to {jitter:e})")]
    NotPositiveDefinite { jitter: f64 },
    #[error("training diverged at epoch {epoch}")]
    DivergedTraining { epoch: usize },
    #[error("solver did not converge within {iterations} iterations")]
    SolverNotConverged { iterations: usize },
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid fold count k={k} for n={n}")]
    InvalidK { k: usize, n: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("target is constant")]
    ConstantTarget,
    #[error("input is constant")]
    ConstantInput,
    #[error("reports were produced on different fold plans")]
    FoldPlanMismatch,
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: Box<Error> },
    #[error("pipeline mismatch: {0}")]
    PipelineMismatch(String),
    #[error("carbon content must be positive")]
    ZeroCarbon,
    #[error("fixed point is infeasible: {0}")]
    InfeasibleFixedPoint(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}`: {message}")]
    TypeError { key: String, message: String },
    #[error("i/o: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
