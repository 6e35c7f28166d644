use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GmcError {
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested moment does not exist (n >= tau, or n >= 2/mu).
    #[error("moment of order {order} diverges (requires order < {limit})")]
    Divergent { order: f64, limit: f64 },

    /// A Gamma factor hit a pole; `factor` names which one, `index` the product index.
    #[error("Gamma pole in factor {factor} at product index {index} (argument {argument})")]
    Pole {
        factor: &'static str,
        index: usize,
        argument: f64,
    },

    #[error("covariance is not positive semi-definite (needed jitter {jitter:e}, limit {limit:e})")]
    NonPsd { jitter: f64, limit: f64 },

    #[error("not enough derivatives of F: need {needed}, got {got}")]
    InsufficientDerivatives { needed: usize, got: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GmcError>;

impl From<std::io::Error> for GmcError {
    fn from(e: std::io::Error) -> Self {
        GmcError::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(GmcError::Domain(msg.into()))
}
