use alloc::string::String;

/// Errors raised by geometry, problem and solver operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coordinate {index} = {value} lies outside the domain of the {geometry} geometry")]
    Domain {
        geometry: &'static str,
        index: usize,
        value: f64,
    },

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the {geometry} geometry cannot be paired with a {constraint} constraint")]
    UnsupportedPairing {
        geometry: &'static str,
        constraint: &'static str,
    },

    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 0")]
    DisconnectedGraph { vertex: usize },

    #[error("numerical failure at iteration {iter}: {reason}")]
    NumericalFailure { iter: usize, reason: String },

    #[error("oracle failure: {0}")]
    Oracle(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
