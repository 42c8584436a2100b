//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {left} vs {right}")]
    Shape { left: String, right: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("schema error: missing column `{0}`")]
    Schema(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("aggregation error: {0}")]
    Aggregation(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn shape(left: impl ToString, right: impl ToString) -> Self {
        Error::Shape { left: left.to_string(), right: right.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
