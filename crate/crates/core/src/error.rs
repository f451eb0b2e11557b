use thiserror::Error;

/// Errors returned by this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model or series specification is invalid or inadmissible.
    #[error("specification error: {0}")]
    Specification(String),

    /// A model was run against a series or state layout it was not built for.
    #[error("structural error: {0}")]
    Structural(String),

    /// The recursion left the admissible region (for example a nonpositive
    /// one-step prediction under multiplicative error).
    #[error("degenerate model at observation {index}: {reason}")]
    Degenerate { index: usize, reason: String },

    /// Parameter estimation could not produce a finite objective.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Input values outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The innovation sampler produced a non-finite draw.
    #[error("generation error: replicate {replicate}, draw {index} is not finite")]
    NonFiniteDraw { replicate: usize, index: usize },

    /// Malformed tabular input.
    #[error("input error at line {line}: {message}")]
    Input { line: usize, message: String },

    /// Malformed serialized model.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
