use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// The domain violates a hypothesis of the gap bound (hemisphere, hull
    /// or curvature-witness conditions).
    #[error("ineligible: {0}")]
    Ineligible(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn ineligible(msg: impl Into<String>) -> Self {
        Error::Ineligible(msg.into())
    }

    /// True for errors that come from the caller's input rather than from a
    /// numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Invalid(_) | Error::Ineligible(_) | Error::Parse { .. } | Error::Io(_)
        )
    }
}
