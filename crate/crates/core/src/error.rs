//! Crate-wide error type.

/// Errors produced by the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An operation received an empty collection it cannot work with.
    #[error("empty input to {op}")]
    EmptyInput { op: &'static str },

    /// Two objective vectors (or rows of a batch) disagree on dimension.
    #[error("objective length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A selection asked for more items than are available.
    #[error("k = {k} exceeds the number of available points ({n})")]
    KTooLarge { k: usize, n: usize },

    /// A benchmark lookup hit a (config, fidelity) pair outside the table.
    #[error("benchmark `{name}` has no cell for config {config} at fidelity {fidelity}")]
    MissingCell {
        name: String,
        config: usize,
        fidelity: u64,
    },

    /// A file failed structural validation while being read.
    #[error("{path}:{line}: {msg}")]
    Load {
        path: String,
        line: usize,
        msg: String,
    },

    /// A value or combination of values violates a documented contract.
    #[error("{0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for contract-violation errors built from format strings.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
