use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum CoverError {
    #[error("symbol {symbol} out of range for alphabet of size {sigma}")]
    SymbolOutOfRange { symbol: u32, sigma: u32 },

    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("range {start}..{end} out of bounds for text of length {len}")]
    RangeOutOfBounds { start: usize, end: usize, len: usize },

    #[error("factor code for length {len} over alphabet {sigma} does not fit in 64 bits")]
    FactorCodeOverflow { len: usize, sigma: u32 },

    #[error("pattern must be non-empty")]
    EmptyPattern,

    #[error("IPM window of length {y_len} exceeds twice the pattern length {x_len}")]
    IpmWindowTooLong { x_len: usize, y_len: usize },

    #[error("adversary query budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("length {len} out of range 1..={max}")]
    LengthOutOfRange { len: usize, max: usize },

    #[error("index data corrupt: {0}")]
    IndexCorrupt(String),

    #[error("deserialize: {0}")]
    Deserialize(String),
}
