use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the lab.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration or precondition failure; lists the offending fields.
    #[error("validation error: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// Configuration text could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Unknown experiment or malformed invocation.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical procedure failed (non-contraction, overflow, NaN).
    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        /// JSON dump of the offending state, when one exists.
        dump: Option<String>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical {
            message: msg.into(),
            dump: None,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
