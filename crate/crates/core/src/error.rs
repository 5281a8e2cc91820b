use alloc::string::String;

/// Errors raised by the core library.
///
/// The variants follow the failure classes used throughout the toolkit: bad inputs
/// (`Domain`), violated hypotheses of an approximation lemma (`Contract`), work or
/// memory guards (`Resource`), quadrature that did not settle (`Convergence`) and text
/// that does not follow the polynomial grammar (`Parse`).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}

macro_rules! contract {
    ($($arg:tt)*) => { $crate::Error::Contract(alloc::format!($($arg)*)) };
}

macro_rules! resource {
    ($($arg:tt)*) => { $crate::Error::Resource(alloc::format!($($arg)*)) };
}

pub(crate) use {contract, domain, resource};
