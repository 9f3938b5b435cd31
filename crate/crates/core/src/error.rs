//! Error type shared by every module.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed input. `line`/`column` are 1-based; `column` is 0 when the
    /// format is line-oriented and has no meaningful column.
    #[error("parse error at {}line {line}, column {column}: {message}", fmt_path(.path))]
    Parse {
        path: Option<PathBuf>,
        line: u64,
        column: u64,
        message: String,
    },

    /// Structurally valid input missing a required element.
    #[error("schema error{}: missing element <{element}>", fmt_in_path(.path))]
    Schema {
        path: Option<PathBuf>,
        element: String,
    },

    #[error("duplicate key: {0}")]
    DuplicateKey(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub fn invalid_argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Attach a file path to an error produced while reading that file.
    pub fn with_path(self, path: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse {
                path: None,
                line,
                column,
                message,
            } => Error::Parse {
                path: Some(path.into()),
                line,
                column,
                message,
            },
            Error::Schema {
                path: None,
                element,
            } => Error::Schema {
                path: Some(path.into()),
                element,
            },
            other => other,
        }
    }
}

fn fmt_path(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("{}, ", p.display()),
        None => String::new(),
    }
}

fn fmt_in_path(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!(" in {}", p.display()),
        None => String::new(),
    }
}
