use alloc::string::String;
use alloc::vec::Vec;

use crate::lp::LpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch on {axis}: expected {expected}, found {found}")]
    DimensionMismatch {
        axis: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large: {size} exceeds the cap of {cap} ({what})")]
    TooLarge {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("linear program ended with status {status:?} ({context})")]
    Lp {
        status: LpStatus,
        context: &'static str,
    },

    #[error("reduced form violates the Border inequality for type set {set:?} by {excess:e}")]
    InfeasibleReducedForm { set: Vec<usize>, excess: f64 },

    #[error("allocation rule reduced form differs from the target by {max_error:e}")]
    ReducedFormMismatch { max_error: f64 },

    #[error("sampling oracle failed: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn lp(status: LpStatus, context: &'static str) -> Self {
        Error::Lp { status, context }
    }
}
