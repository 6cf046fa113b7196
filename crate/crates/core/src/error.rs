use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for exit codes and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Io,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("model: syntax error at byte {position}: {message} (expected one of: {})", expected.join(", "))]
    Syntax {
        position: usize,
        message: String,
        expected: Vec<String>,
    },
    #[error("model: empty expression")]
    EmptyExpression,
    #[error("model: variable x{index} exceeds arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("{context}: dimension mismatch (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{context}: non-finite value ({detail})")]
    NonFinite { context: &'static str, detail: String },
    #[error("{context}: singular matrix (condition estimate {condition:e})")]
    Singular { context: &'static str, condition: f64 },
    #[error("{context}: matrix numerically singular (largest eigenvalue {largest:e}, floor {floor:e})")]
    EigenFloor {
        context: &'static str,
        largest: f64,
        floor: f64,
    },
    #[error("{context}: not enough rows ({rows} rows, need at least {needed})")]
    TooFewRows {
        context: &'static str,
        rows: usize,
        needed: usize,
    },
    #[error("data: cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("data: ragged row {row} ({found} fields, expected {expected})")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("data: non-numeric cell at row {row}, column {col}: {cell:?}")]
    NonNumeric { row: usize, col: usize, cell: String },
    #[error("data: csv: {0}")]
    Csv(String),
    #[error("data: covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e}, tolerance {tolerance:e})")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },
    #[error("data: covariance is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("data: invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("valuefn: conditioning event has zero probability")]
    ZeroProbability,
    #[error("valuefn: all kernel weights underflow to zero; try a larger bandwidth")]
    WeightsUnderflow,
    #[error("valuefn: invalid value-function spec: {0}")]
    InvalidSpec(String),
    #[error("shapley: coalition {0} missing from value table")]
    MissingCoalition(String),
    #[error("shapley: {n} features exceeds the exact-enumeration limit of {limit}")]
    TooManyFeatures { n: usize, limit: usize },
    #[error("shapley: rank-deficient WLS design; null direction {null_direction:?}")]
    RankDeficient { null_direction: Vec<f64> },
    #[error("shapley: coalition {coalition} appears with inconsistent values {first} and {second}")]
    InconsistentDuplicate { coalition: String, first: f64, second: f64 },
    #[error("{context}: invalid argument: {message}")]
    InvalidArgument { context: &'static str, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Json(_) | Error::Csv(_) => ErrorKind::Io,
            Error::RaggedRow { .. } | Error::NonNumeric { .. } => ErrorKind::Io,
            Error::Syntax { .. }
            | Error::EmptyExpression
            | Error::VariableOutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidSpec(_)
            | Error::InvalidArgument { .. }
            | Error::TooManyFeatures { .. } => ErrorKind::Usage,
            _ => ErrorKind::Numeric,
        }
    }

    pub(crate) fn invalid(context: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            context,
            message: message.into(),
        }
    }

    pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected,
                actual,
            })
        }
    }
}
