use thiserror::Error;

use crate::radial_ode::FailReason;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integration failed: {0}")]
    Integration(FailReason),

    #[error("no sign change bracketed in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("transform undefined: {0}")]
    Domain(String),

    #[error("degenerate quotient: {0}")]
    Degenerate(String),
}

impl From<FailReason> for Error {
    fn from(reason: FailReason) -> Self {
        Error::Integration(reason)
    }
}
