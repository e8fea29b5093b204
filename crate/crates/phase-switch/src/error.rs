use thiserror::Error;

/// Errors produced by parameter validation, state checks, and integration.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A function argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Bloch state violates the Bloch-vector bound beyond numerical slack.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Time integration failed; `t` names the offending time.
    #[error("integration error at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    /// An operation was called with structurally wrong inputs
    /// (e.g. a sweep over the wrong grid axis).
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
