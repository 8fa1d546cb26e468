use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: missing column `{column}` in header")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}, line {line}: {message}")]
    BadRow {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("duplicate date {date} in {context}")]
    DuplicateDate { date: String, context: String },

    #[error("no overlapping sample across {0}")]
    NoOverlap(String),

    #[error("missing value for `{column}` at {date} inside the estimation window")]
    MissingCell { column: String, date: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("cannot take log of `{column}` at {date}: value {value} is not positive")]
    NonPositive {
        column: String,
        date: String,
        value: f64,
    },

    #[error("degenerate weights at {0}: total market capitalization is zero")]
    DegenerateWeights(String),

    #[error("missing {field} for asset `{asset}` at {date}")]
    MissingConstituentValue {
        asset: String,
        field: &'static str,
        date: String,
    },

    #[error("design matrix is rank deficient; collinear columns: {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("insufficient observations: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("{0} is undefined")]
    Undefined(String),

    #[error("test not applicable: {0}")]
    NotApplicable(String),

    #[error("no level relationship: lagged dependent level coefficient is {0:e}")]
    NoLevelRelationship(f64),

    #[error("no critical bounds for case {case}, k = {k}; supply them with a bounds file")]
    MissingBounds { case: String, k: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
