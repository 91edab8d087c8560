use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A matrix or Hilbert space would exceed the configured dimension cap.
    #[error("dimension {requested} exceeds the configured limit {limit}")]
    DimensionLimit { requested: u128, limit: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("target variance {0:e} is too small for a normalized error")]
    DegenerateTarget(f64),

    #[error("experimental run {run} failed: {source}")]
    Run { run: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True for errors caused by the size cap rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            Error::DimensionLimit { .. } => true,
            Error::Run { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }
}
