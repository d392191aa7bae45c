use thiserror::Error;

/// Errors returned by the matcher, dematcher and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("symbol {symbol} has positive empirical mass but zero target probability")]
    SupportViolation { symbol: usize },

    #[error("symbol {symbol} has zero probability")]
    ZeroProbability { symbol: usize },

    #[error("alphabet sizes differ: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("sequence does not have the code's composition")]
    CompositionMismatch,

    #[error("index is outside the type class")]
    IndexOutOfRange,

    #[error("expected {expected} items, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("sequence is in the type class but is not a codeword")]
    NotACodeword,

    #[error("input length {m} exceeds the enumeration limit {limit}")]
    TooLarge { m: u64, limit: u64 },

    #[error("source model has no symbols left")]
    Exhausted,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed report: {0}")]
    Report(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
