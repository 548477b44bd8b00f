use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain an operation accepts.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Shapes or lengths of inputs disagree.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// A decision variable lies outside its search range.
    #[error("{field} = {value} is outside [{lower}, {upper}]")]
    Bound {
        field: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("evaluation failed in generation {generation}, individual {index}: {message}")]
    Evaluation {
        generation: usize,
        index: usize,
        message: String,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("archives are not comparable: {0}")]
    Comparison(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
