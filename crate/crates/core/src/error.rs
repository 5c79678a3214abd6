use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (witness {0:e})")]
    NotPsd(f64),

    #[error("kernel matrix is numerically singular: {0}")]
    Singular(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("cross-validation failed: every fold was skipped")]
    AllFoldsSkipped,

    #[error(transparent)]
    Data(#[from] DataError),
}

/// Failures while reading or writing datasets and reports.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: row {row} has {found} fields, expected {expected}")]
    Ragged {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: row {row}, column {column}: non-numeric feature value {value:?}")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: usize,
        value: String,
    },

    #[error("{path}: no data rows")]
    Empty { path: PathBuf },

    #[error("label column {0} not found")]
    LabelColumn(String),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// Coarse failure classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DimensionMismatch(_) | Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Data(_) => ErrorKind::Data,
            Error::NotSymmetric(_)
            | Error::NotPsd(_)
            | Error::Singular(_)
            | Error::NoConvergence { .. }
            | Error::AllFoldsSkipped => ErrorKind::Numerical,
        }
    }
}
