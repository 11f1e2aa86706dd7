use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classification used by front ends to pick exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Resource,
    Internal,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("empty input: no symbols to process")]
    EmptyInput,

    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(u64),

    #[error("symbol {symbol} at position {index} is outside the alphabet 0..{m}")]
    AlphabetViolation { index: usize, symbol: i64, m: u32 },

    #[error("unparsable token {token:?} at position {index}")]
    InvalidToken { index: usize, token: String },

    #[error("contiguous digit format requires an alphabet of at most 10 symbols, got {0}")]
    ContiguousAlphabet(u32),

    #[error("non-finite value at line {line}")]
    NonFinite { line: usize },

    #[error("need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("initial context has length {got}, expected depth {expected}")]
    ContextLength { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("block length {k} is outside 1..={n}")]
    BlockLength { k: usize, n: usize },

    #[error("insufficient data: need at least {needed} symbols, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("chain has zero transition probabilities; use the Monte Carlo entropy path or floor the parameters")]
    DegenerateChain,

    #[error("{states} chain states exceed the exact-mode budget of {limit}; use the Monte Carlo entropy path")]
    StateBudget { states: u128, limit: u128 },

    #[error("stationary solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("estimated sample storage of {estimated_bytes} bytes exceeds the budget of {budget} bytes")]
    MemoryBudget { estimated_bytes: u128, budget: u128 },

    #[error("need at least 2 values to summarize, got {0}")]
    InsufficientSamples(usize),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidAlphabet(_)
            | Error::ContiguousAlphabet(_)
            | Error::BlockLength { .. }
            | Error::UnknownFixture(_) => ErrorKind::Usage,
            Error::StateBudget { .. } | Error::MemoryBudget { .. } => ErrorKind::Resource,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Data,
        }
    }
}
