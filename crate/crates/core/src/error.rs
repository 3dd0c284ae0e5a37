use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is outside the map domain [0, 1)")]
    Domain { value: f64 },

    #[error("invalid skew parameter {0}: must lie strictly inside (0, 1)")]
    InvalidSkew(f64),

    #[error("invalid pair probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("point {x} falls in the {pair} branch, which has zero probability")]
    DegenerateBranch { x: f64, pair: &'static str },

    #[error("symbolic sequence is empty")]
    EmptySequence,

    #[error("symbol {0} is not binary")]
    InvalidSymbol(u8),

    #[error("sequence of length {len} has no complete symbol pair")]
    SequenceTooShort { len: usize },

    #[error("optimal skew {0} is degenerate: the sequence must contain both symbols")]
    DegenerateSkew(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("class `{0}` has no training instances")]
    EmptyClass(String),

    #[error("label `{0}` is not one of the model classes")]
    UnknownLabel(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("expected {expected} features, found {found}")]
    FeatureCountMismatch { expected: usize, found: usize },

    #[error("class `{0}` is absent from the training split")]
    ClassAbsentFromTrain(String),

    #[error("cannot build {folds} folds from {instances} instances")]
    FoldsExceedInstances { folds: usize, instances: usize },

    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("row {row}, column `{column}`: {message}")]
    BadValue {
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset {0}")]
    Dataset(String),

    #[error("unsupported model version {0}")]
    ModelVersion(u32),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
