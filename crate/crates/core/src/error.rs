use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Input violates a documented precondition.
    InvalidInput(String),
    /// Two independent computations disagreed, or a formula produced a value
    /// outside its guaranteed range.
    Integrity(String),
    /// The request is well formed but outside what the engine decomposes.
    Unsupported(String),
    /// Homology was requested at or beyond the edge of a truncated complex.
    OutOfWindow { degree: u32, cutoff: u32 },
    /// A size guard tripped.
    LimitExceeded(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Integrity(m) => write!(f, "integrity error: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::OutOfWindow { degree, cutoff } => write!(
                f,
                "degree {degree} is outside the computable window (cutoff {cutoff}, need degree < cutoff)"
            ),
            Error::LimitExceeded(m) => write!(f, "limit exceeded: {m}"),
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn integrity(msg: impl Into<String>) -> Error {
    Error::Integrity(msg.into())
}

impl core::error::Error for Error {}
