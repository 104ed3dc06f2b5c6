use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Single-generation AI is only defined for interior states.
    #[error("boundary event: {0}")]
    BoundaryEvent(String),

    /// Both the null and the alternative probability are zero.
    #[error("undefined event: probability is zero under both models")]
    UndefinedEvent,

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("population size {n_pop} exceeds the dense solver cap {cap} and the iterative fallback is disabled")]
    Capacity { n_pop: u32, cap: u32 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
