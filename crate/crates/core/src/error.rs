use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} cues, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("need at least 2 items, got {0}")]
    TooFewItems(usize),

    #[error("all pairs tied: no comparison has distinct criterion values")]
    AllPairsTied,

    #[error(
        "exhaustive enumeration needs {configurations} configurations, above the cap of {cap}; \
         use MCMC sampling instead"
    )]
    EnumerationCap { configurations: f64, cap: usize },

    #[error("posterior has no entries")]
    EmptyPosterior,

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("column `{0}` is not numeric")]
    NonNumericColumn(String),

    #[error("only {0} usable rows after dropping missing values, need at least 2")]
    TooFewRows(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the data rather than by the caller's arguments.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::TooFewItems(_)
                | Error::AllPairsTied
                | Error::Io { .. }
                | Error::Csv(_)
                | Error::MissingColumn(_)
                | Error::NonNumericColumn(_)
                | Error::TooFewRows(_)
                | Error::DimensionMismatch { .. }
        )
    }
}
