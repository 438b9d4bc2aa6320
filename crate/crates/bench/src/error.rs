use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    /// A configuration file line could not be parsed; the message names the
    /// offending key.
    #[error("{path}:{line}: {message}")]
    ConfigFile {
        path: String,
        line: usize,
        message: String,
    },

    /// A resolved benchmark parameter is out of range.
    #[error("invalid `{key}`: {message}")]
    InvalidSpec { key: &'static str, message: String },

    #[error(transparent)]
    Model(#[from] btai::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
