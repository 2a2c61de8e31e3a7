use thiserror::Error;

/// Errors raised by the library.
///
/// Each variant maps onto one CLI exit code, see [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A bisection or search bracket does not contain a solution.
    #[error("search bracket error: {0}")]
    Bracket(String),
    /// The requested work exceeds the configured resource cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    /// A Monte Carlo estimate could not be formed (non-finite samples).
    #[error("estimation failure: {0}")]
    Estimation(String),
    /// A checked invariant did not hold.
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Bracket(_) => 3,
            Error::ResourceLimit(_) => 4,
            Error::Estimation(_) | Error::Invariant(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
