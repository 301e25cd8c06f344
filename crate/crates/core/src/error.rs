use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input data: malformed files, invalid graphs, violated preconditions.
    Data,
    /// A numerical routine failed: divergence, singular systems, budget exhaustion.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {got} exceeds the limit of {limit}")]
    OverLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("test-suite shortfall: wanted {wanted} non-planar graphs, found {found} after {tried} candidates")]
    Shortfall {
        wanted: usize,
        found: usize,
        tried: usize,
    },

    #[error("validation failed for {what}: claimed {claimed}, re-evaluated {actual}")]
    ValidationMismatch {
        what: String,
        claimed: f64,
        actual: f64,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("power flow did not converge after {iterations} iterations (residual trace: {trace:?})")]
    Divergence { iterations: usize, trace: Vec<f64> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON at byte {offset} (line {line}, column {column}): {message}")]
    Json {
        path: PathBuf,
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: unsupported schema version: expected {expected}, found {found}")]
    SchemaVersion {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Numeric(_) | Error::Divergence { .. } => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
