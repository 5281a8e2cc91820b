//! Command-line front end for `newton-circle-core`: report emission, finite-function
//! files, worker-pool helpers and the named verification suites.

pub mod cli;
pub mod function;
pub mod parallel;
pub mod report;
pub mod suites;

pub use report::{emit_report, Format, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] newton_circle_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// `2` for anything the caller typed wrong, `1` for everything else.
    pub fn exit_code(&self) -> i32 {
        use newton_circle_core::Error as E;
        match self {
            Error::Usage(_) => 2,
            Error::Core(E::Parse { .. } | E::Domain(_) | E::Contract(_)) => 2,
            Error::Core(_) | Error::Io(_) => 1,
        }
    }
}
