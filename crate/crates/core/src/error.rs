use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of budget before meeting the tolerance.
    #[error(
        "tolerance not reached: best estimate {estimate:e} with relative error bound {rel_error:e} (requested {requested:e})"
    )]
    ToleranceNotReached { estimate: f64, rel_error: f64, requested: f64 },

    /// The linear feasibility solver did not terminate cleanly.
    #[error("feasibility solver failure: {0}")]
    SolverFailure(String),

    /// A computed result violated an invariant that should hold for every valid input.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
