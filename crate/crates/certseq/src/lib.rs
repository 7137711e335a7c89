//! Certified arithmetic for powered fractional-part and cosine sequences.
//!
//! The crate provides exact dyadic big-floats, rigorous ball arithmetic with
//! explicit error accounting, continued-fraction machinery, and on top of
//! those: certified evaluation of sequences of the form {nx}^n and
//! |g(cos(πnx))|^n, witness searches that steer such sequences toward target
//! values, and counting routines with proven lower bounds.  Every comparison
//! that a result depends on is decided by exact integer arithmetic or by
//! interval enclosures that are widened only outward.

pub mod ball;
pub mod cf;
pub mod counting;
pub mod dyadic;
pub mod error;
pub mod gpoly;
pub mod parse;
pub mod real;
pub mod seq;
pub mod t4;
pub mod witness;

pub use error::{Error, Result};

/// Escalation policy for certified evaluation: results target an absolute
/// radius of 2^−target, and internal working precision may grow up to `cap`
/// bits before an undecidable comparison is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    pub target: u32,
    pub cap: u32,
}

impl Precision {
    /// Default for sequence evaluation: 53-bit targets, 2^16-bit cap.
    pub fn eval_default() -> Self {
        Precision { target: 53, cap: 1 << 16 }
    }

    /// Default for continued-fraction expansion: 64-bit start, 2^20-bit cap.
    pub fn expand_default() -> Self {
        Precision { target: 64, cap: 1 << 20 }
    }

    pub fn with_cap(self, cap: u32) -> Self {
        Precision { cap: cap.max(self.target), ..self }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::eval_default()
    }
}
