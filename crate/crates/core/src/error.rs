use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the admissible region of a function family.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter violates its declared range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Bracketing or iteration failed to locate a root.
    #[error("no root: {0}")]
    NoRoot(String),
    /// A denominator of the symmetric slope inversion vanished.
    #[error("degenerate demand system: {0}")]
    Singular(String),
    /// A stability determinant required to be positive was not.
    #[error("stability condition violated: {0}")]
    Stability(String),
    /// A caller-supplied point does not satisfy the stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A second-order condition failed at a candidate solution.
    #[error("second-order condition violated: {0}")]
    Soc(String),
}

pub type Result<T> = std::result::Result<T, Error>;
