use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("bad value '{value}' for {key}: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("{path}:{line}: expected 'key = value', got '{text}'")]
    Syntax { path: PathBuf, line: usize, text: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: map: {source}")]
    Map {
        path: PathBuf,
        #[source]
        source: seqec::maze::MapError,
    },
    #[error("{path}: schema mismatch in column '{column}': {detail}")]
    Schema { path: PathBuf, column: String, detail: String },
    #[error("{0}: no data rows")]
    Empty(PathBuf),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] seqec::Error),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Csv { path, source }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
