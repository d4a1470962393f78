use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A series or operator is not known far enough to produce the requested
    /// coefficient.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A recursion that is guaranteed to be solvable was not; this is a bug.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    /// A contour or quadrature setting cannot work as requested.
    #[error("configuration error: {0}")]
    Configuration(String),
}

pub type Result<T> = core::result::Result<T, Error>;
