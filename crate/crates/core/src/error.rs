use std::path::PathBuf;

use thiserror::Error;

/// Failure to parse a unit string or a rendered expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
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
    #[error("{path}: missing {what} header row")]
    MissingHeader { path: PathBuf, what: &'static str },
    #[error("{path}: need at least one feature column and one target column, found {found}")]
    TooFewColumns { path: PathBuf, found: usize },
    #[error("{path}: unit header, column {column} (`{name}`): {message}")]
    BadUnit {
        path: PathBuf,
        column: usize,
        name: String,
        message: String,
    },
    #[error("{path}: row {row} has {found} cells, expected {expected}")]
    Ragged {
        path: PathBuf,
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("{path}: row {row}, column {column} (`{name}`): `{cell}` is not a finite number")]
    NotNumeric {
        path: PathBuf,
        row: usize,
        column: usize,
        name: String,
        cell: String,
    },
    #[error("{path}: no data rows")]
    Empty { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("population_size must be at least 10, got {0}")]
    PopulationTooSmall(usize),
    #[error("max_complexity must be at least 1")]
    ZeroComplexity,
    #[error("function set is empty")]
    EmptyFunctionSet,
    #[error("invalid operator in function set: {0}")]
    BadOperator(String),
    #[error("operator probabilities must be non-negative and not all zero")]
    BadOperatorRates,
    #[error("mode {0} requires unit annotations on the dataset")]
    MissingUnits(String),
    #[error("dataset has no feature columns")]
    NoFeatures,
    #[error("exactly one of time budget and generation budget must be set")]
    Budget,
}
