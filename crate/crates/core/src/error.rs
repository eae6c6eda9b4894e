use thiserror::Error;

/// Errors raised by the library.
///
/// The variants mirror the failure classes a caller may want to treat
/// differently: bad inputs, violated preconditions, resource guards and
/// numerical breakdowns.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument is malformed (unsorted grid, bad interval, ...).
    #[error("argument error: {0}")]
    Argument(String),
    /// The model does not satisfy the hypotheses the operation relies on.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A size guard was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// A pathwise invariant that holds by construction was observed broken.
    #[error("internal consistency fault: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(format!($($arg)*)))
    };
}
pub(crate) use bail;
