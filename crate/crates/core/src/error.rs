use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("trace is {trace:.12} instead of 1 (deviation {deviation:.3e})")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("integration failed at t = {t}: min eigenvalue {min_eigenvalue:.3e}; try a smaller time step")]
    IntegrationFailure { t: f64, min_eigenvalue: f64 },

    #[error("cross-check failed at t = {t}: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    CrossCheck { t: f64, deviation: f64, tolerance: f64 },

    #[error("spectral decompositions carry different branch labels")]
    UnmatchedBranches,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 1 for input/validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. }
            | Error::IntegrationFailure { .. }
            | Error::CrossCheck { .. }
            | Error::UnmatchedBranches => 2,
            _ => 1,
        }
    }
}
