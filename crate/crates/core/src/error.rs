use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs are individually valid but inconsistent with each other.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A numerical procedure did not reach the requested accuracy.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// The problem exceeds what the exact method can enumerate.
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// Time integration blew up.
    #[error("integration error: {0}")]
    Integration(String),
    /// Not enough usable points for a regression.
    #[error("fit error: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
