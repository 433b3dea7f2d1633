//! Command-line front end, file formats and Monte Carlo oracles for
//! [`airyproc_core`].
//!
//! The numerical work lives in the core crate; this crate adds what needs
//! `std`: random sampling, JSON barrier files, CSV/JSON tables, the `airyproc`
//! binary and the acceptance suite behind `airyproc selftest`.

pub mod acceptance;
pub mod barrier_file;
pub mod cli;
pub mod oracles;
pub mod output;

/// Errors of the front end. [`Error::exit_code`] maps them onto the CLI
/// contract.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("barrier file: {0}")]
    Barrier(String),
    #[error(transparent)]
    Core(#[from] airyproc_core::Error),
    #[error("{op} failed: {source}")]
    Numeric {
        op: &'static str,
        source: airyproc_core::Error,
    },
    #[error("{0}")]
    Tolerance(String),
    #[error("acceptance: {0}")]
    Acceptance(String),
    #[error("output: {0}")]
    Output(String),
}

impl Error {
    /// Usage and parse problems give 2, numeric failures 3.
    pub fn exit_code(&self) -> i32 {
        use airyproc_core::Error as E;
        match self {
            Error::Usage(_) | Error::Barrier(_) => 2,
            Error::Core(e) | Error::Numeric { source: e, .. } => match e {
                E::InvalidArgument(_) | E::Domain(_) | E::UnorderedTimes | E::InvalidBarrier(_) => 2,
                _ => 3,
            },
            Error::Tolerance(_) | Error::Acceptance(_) => 3,
            Error::Output(_) => 1,
        }
    }
}

/// Tag a core error with the operation that produced it.
pub(crate) fn during<T>(op: &'static str, r: airyproc_core::Result<T>) -> Result<T, Error> {
    r.map_err(|source| Error::Numeric { op, source })
}
