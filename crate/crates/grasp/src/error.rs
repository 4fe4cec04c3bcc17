//! Crate-wide error type.
//!
//! Numerical routines fail loudly on domain violations instead of silently
//! returning NaN; samplers distinguish recoverable per-sweep failures (mode
//! search, proposal fit) from hard failures (a chain whose precision matrix
//! repeatedly fails to factorize).

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A special function or distribution was called outside its domain.
    #[error("{func}: {what} must be {requirement}, got {value}")]
    Domain {
        func: &'static str,
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// A symmetric matrix expected to be positive definite failed its
    /// Cholesky factorization.
    #[error("{context}: matrix is not positive definite")]
    NotPositiveDefinite { context: &'static str },

    /// The Newton mode search for a shape parameter did not converge.
    #[error("shape mode search did not converge within {max_iter} iterations")]
    ModeSearchDiverged { max_iter: usize },

    /// The least-squares gamma proposal fit produced an unusable proposal.
    #[error("gamma proposal fit degenerate: {reason}")]
    DegenerateProposal { reason: &'static str },

    /// Too many consecutive sweep-level failures; the chain state can no
    /// longer be trusted.
    #[error("chain aborted: {failures} factorization failures in {sweeps} sweeps (limit {limit_percent}%)")]
    ChainAborted {
        failures: usize,
        sweeps: usize,
        limit_percent: f64,
    },

    /// Malformed or inconsistent input data (dimensions, group map, CSV
    /// contents).  The message names the offending file, row, or field.
    #[error("{0}")]
    Data(String),

    /// CSV-level read/write failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// Filesystem failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand for a malformed-data error.
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// True for failures of numerical routines (as opposed to bad input
    /// data or I/O); the CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::ModeSearchDiverged { .. }
                | Error::DegenerateProposal { .. }
                | Error::ChainAborted { .. }
        )
    }
}
