use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument out of domain ({msg})")]
    Domain { func: &'static str, msg: String },

    #[error("{func}: no convergence (best estimate {estimate:e}, error estimate {error:e})")]
    NonConvergence {
        func: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("{func}: precondition violated ({msg})")]
    Precondition { func: &'static str, msg: String },

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParam { name: &'static str, msg: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }

    pub(crate) fn precondition(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition {
            func,
            msg: msg.into(),
        }
    }

    /// True for errors caused by a numerical procedure failing to meet its tolerance.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
