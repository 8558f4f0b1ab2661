use thiserror::Error;

/// Errors raised by the exact enumeration and linear-algebra routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid type vector: {0}")]
    InvalidType(String),

    #[error("invalid configuration: {0}")]
    InvalidInput(String),

    #[error("site {0} is vacant")]
    VacantSite(usize),

    #[error("{what} needs {size} items, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("chain is reducible: stationary space has dimension {0}")]
    Reducible(usize),

    #[error("arity mismatch: {0} vs {1} variables")]
    ArityMismatch(usize, usize),

    #[error("inadmissible partition {0:?}")]
    Inadmissible(Vec<usize>),

    #[error("internal identity failed: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(what: &'static str, size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}
