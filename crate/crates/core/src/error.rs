use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimerError {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("unstable fixed point: covariance undefined (max Re eigenvalue = {max_re:e})")]
    NotHurwitz { max_re: f64 },

    #[error("integration failed at t = {t:e}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl DimerError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        DimerError::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = DimerError> = std::result::Result<T, E>;
