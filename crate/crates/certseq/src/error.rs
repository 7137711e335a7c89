use thiserror::Error;

use crate::witness::WitnessReport;

/// Errors shared across the crate. Every failure mode that a caller can act on
/// gets its own variant; none of them are silently absorbed into a result.
#[derive(Debug, Error)]
pub enum Error {
    /// A convergent or quotient index past the end of a finite expansion.
    #[error("depth exceeded: requested index {requested}, only {available} available")]
    DepthExceeded { requested: u64, available: u64 },

    /// The working-precision cap was reached before a comparison or digit
    /// could be certified. Reported, never rounded away.
    #[error("precision exhausted at {bits} bits while {context}")]
    PrecisionExhausted { bits: u32, context: String },

    /// An expansion terminated: the input was exactly rational where an
    /// irrational was required.
    #[error("value is rational; an irrational input is required here")]
    NotIrrational,

    #[error("invalid continued fraction: {0}")]
    InvalidCf(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Targets for witness searches must lie strictly inside (0, 1).
    #[error("target must lie strictly inside (0, 1)")]
    TargetOutOfRange,

    /// A search ran out of candidates. Carries the closest candidate seen so
    /// the caller can inspect how near the search came.
    #[error("search budget exhausted before a certified hit")]
    BudgetExhausted { best: Option<Box<WitnessReport>> },

    /// The source's continued fraction is not provably unbounded on even
    /// indices, so the fractional-power construction does not apply.
    #[error("source is not provably unbounded on even-index quotients")]
    NotDenseCandidate,

    #[error("invalid bounding polynomial: {0}")]
    InvalidG(String),

    /// The composed series had no nonzero coefficient within the order cap.
    #[error("no vanishing order detected within the series cap")]
    DegenerateG,

    /// A schedule step would need an index beyond the configured magnitude cap.
    #[error("schedule infeasible: next index exceeds cap {cap}")]
    InfeasibleSchedule { cap: u64 },

    /// The selected convergent denominator is too small for the requested
    /// approximation radius (the multiplier formula needs its argument > 2).
    #[error("convergent denominator too small for the requested radius")]
    TooSmall,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precision(bits: u32, context: impl Into<String>) -> Self {
        Error::PrecisionExhausted {
            bits,
            context: context.into(),
        }
    }

    /// Stable machine-readable name, used by the CLI error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DepthExceeded { .. } => "DepthExceeded",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NotIrrational => "NotIrrational",
            Error::InvalidCf(_) => "InvalidCf",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::TargetOutOfRange => "TargetOutOfRange",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::NotDenseCandidate => "NotDenseCandidate",
            Error::InvalidG(_) => "InvalidG",
            Error::DegenerateG => "DegenerateG",
            Error::InfeasibleSchedule { .. } => "InfeasibleSchedule",
            Error::TooSmall => "TooSmall",
        }
    }
}
