use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph construction, quality evaluation, optimization and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("quality is undefined: {0}")]
    UndefinedQuality(String),

    #[error("diagnostic is undefined: {0}")]
    UndefinedDiagnostic(String),

    #[error("instance too large for exhaustive search: {supra_nodes} supra-nodes (limit {limit})")]
    TooLarge { supra_nodes: usize, limit: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
