//! Error type shared across the crate.

/// Crate-wide error enumeration.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector lengths disagree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A gradient contained NaN or infinity.
    #[error("non-finite gradient at step {step}")]
    NonFiniteGradient { step: u64 },

    /// A scalar that must be finite was not.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A configuration is internally inconsistent or malformed.
    #[error("invalid config: {0}")]
    Config(String),

    /// I/O failure, carrying the path it happened on.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input text (CSV, JSON, flag values).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
