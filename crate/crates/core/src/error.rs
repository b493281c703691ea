use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live on different groups, point sets or dimensions.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sequence offered as a Reiter sequence is not one.
    #[error("sequence is not a Reiter sequence: {reason} (defects per term: {defects:?})")]
    Convergence {
        reason: String,
        defects: Vec<String>,
    },

    /// A hypothesis of the requested operation does not hold.
    #[error("precondition `{hypothesis}` failed: {witness}")]
    Precondition { hypothesis: String, witness: String },

    /// Malformed group tables, actions or extensions.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// Interval arithmetic could not decide a comparison; the enclosures are
    /// `[lhs_lo, lhs_hi, rhs_lo, rhs_hi]`.
    #[error(
        "comparison undecided at working precision: lhs in [{}, {}], rhs in [{}, {}]",
        .enclosures[0], .enclosures[1], .enclosures[2], .enclosures[3]
    )]
    Precision { enclosures: Box<[Rational; 4]> },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    TooLarge {
        what: String,
        needed: usize,
        cap: usize,
    },
}

impl Error {
    pub fn precondition(hypothesis: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Precondition {
            hypothesis: hypothesis.into(),
            witness: witness.into(),
        }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
