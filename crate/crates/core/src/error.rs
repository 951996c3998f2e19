use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:e} exceeds {threshold:e}")]
    NotHermitian { asymmetry: f64, threshold: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },

    #[error("matrix is not strictly positive: eigenvalue {eigenvalue:e} <= {threshold:e} with fractional power {power}")]
    NotStrictlyPositive {
        eigenvalue: f64,
        threshold: f64,
        power: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("lower bound k = {k} is not positive; apply shift first")]
    NotPositive { k: f64 },

    #[error("shift gamma = {gamma} must lie strictly below the lower bound k = {k}")]
    Shift { gamma: f64, k: f64 },

    #[error("relation is not symmetric")]
    NotSymmetric,

    #[error("relation is not self-adjoint")]
    NotSelfAdjoint,

    #[error("relation is not nonnegative: form value {value:e}")]
    Indefinite { value: f64 },

    #[error("coordinate map has dependent columns (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("gauss rule with {nodes} nodes failed to converge")]
    Quadrature { nodes: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error("config invalid:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
