use thiserror::Error;

/// Errors raised by the selection library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exhaustive search was requested for more nodes than the configured cap.
    #[error("exhaustive search over {k} nodes exceeds the cap of {cap} nodes")]
    ComplexityGuard { k: usize, cap: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
