use thiserror::Error;

/// Errors reported by the library.
///
/// Everything here is a precondition violation of some operation; none of
/// these are recoverable mid-computation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("empty or non-positive range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("sieve table covers [{have_lo}, {have_hi}] but [{need_lo}, {need_hi}] is required")]
    RangeShortfall {
        need_lo: u64,
        need_hi: u64,
        have_lo: u64,
        have_hi: u64,
    },

    #[error("lag a = 0 has no main-term/remainder decomposition")]
    ZeroLag,

    #[error("correlation table holds |a| <= {a_max} but |a| = {requested} was requested")]
    LagOutOfRange { requested: u64, a_max: u64 },

    #[error("correlation table was built without the main/remainder decomposition")]
    DecompositionMissing,

    #[error("grid config rejected: {0}")]
    InvalidConfig(String),

    #[error("csv parse error: {0}")]
    CsvParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
