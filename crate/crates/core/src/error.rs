use thiserror::Error;

/// Errors raised by the sensing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or detector parameter is outside its valid range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A function argument is outside the function's domain.
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    /// A computed quantity violates an invariant that the formulas guarantee,
    /// which points at inconsistent moments upstream.
    #[error("numeric infeasibility: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
