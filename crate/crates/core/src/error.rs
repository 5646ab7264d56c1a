use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point cloud: {0}")]
    InvalidPointCloud(String),

    #[error("invalid subsample: {0}")]
    InvalidSubsample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix exponential produced non-finite values")]
    NonFiniteExponential,

    #[error("heat operator has no eigenvalue within {tolerance:e} of 1")]
    NoUnitEigenvalue { tolerance: f64 },

    #[error("degenerate eigenbasis: pivot {pivot:e} in row {row} is below {threshold:e}")]
    DegenerateEigenbasis {
        row: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("data set has zero diameter with {0} points; no radius grid can be built")]
    ZeroDiameter(usize),

    #[error("csv error at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical core, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteExponential
                | Error::NoUnitEigenvalue { .. }
                | Error::DegenerateEigenbasis { .. }
        )
    }
}
