use thiserror::Error;

/// Errors raised across the codec, oracle and transducer layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("slice [{from}, {to}) out of range for length {len}")]
    Bounds { from: usize, to: usize, len: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("martingale capital is not strictly positive at prefix length {0}")]
    NonPositive(usize),

    #[error("codec invariant violated: {0}")]
    Invariant(String),

    #[error("invalid codeword at stage {stage}: {reason}")]
    InvalidCodeword { stage: u64, reason: String },

    #[error("decode error: {0}")]
    Decode(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("degenerate output: {0}")]
    DegenerateOutput(String),

    #[error("ambiguous stationary distribution: {0}")]
    Ambiguous(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Spec(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
