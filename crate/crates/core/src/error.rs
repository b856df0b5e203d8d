use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the pruning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("label column {0:?} not found")]
    LabelColumnNotFound(String),

    #[error("selecting the label column by name requires a header row")]
    LabelNameWithoutHeader,

    #[error("label column has fewer than 2 distinct classes (found {found})")]
    TooFewClasses { found: usize },

    #[error("no usable rows were parsed")]
    EmptyDataset,

    #[error("split ratios must be positive and sum to 1 (got {0:?})")]
    BadSplitRatios((f64, f64, f64)),

    #[error("split would leave the {0} part empty")]
    EmptySplitPart(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("attribute count mismatch: pool was trained on {expected} attributes, data has {got}")]
    AttributeMismatch { expected: usize, got: usize },

    #[error("the empty ensemble is infeasible: no classifier selected")]
    EmptyMask,

    #[error("prediction matrix has no classifiers")]
    EmptyPool,

    #[error("exhaustive enumeration supports at most {limit} classifiers (got {got})")]
    PoolTooLarge { got: usize, limit: usize },

    #[error("Pareto archive is empty")]
    EmptyArchive,

    #[error("archive entries violate an invariant: {0}")]
    InvalidArchive(String),

    #[error("malformed prediction-matrix file: {0}")]
    MalformedMatrix(String),

    #[error("malformed mask bitstring: {0}")]
    MalformedMask(String),
}
