use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input matrix is not symmetric: max |a_ij - a_ji| = {max_diff:e} exceeds tolerance {tol:e}")]
    AsymmetricInput { max_diff: f64, tol: f64 },

    #[error("parameter `{name}` must be nonnegative and finite, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("dimension error: {0}")]
    DimensionError(String),

    #[error("symmetric eigensolver did not converge for a {order}x{order} matrix")]
    ConvergenceFailure { order: usize },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("numerical breakdown: non-finite value in iterate at iteration {iter}")]
    NumericalBreakdown { iter: usize },

    #[error("diagonal entry S[{index}][{index}] = {value} is not positive; problem is unbounded below")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("l-infinity bound is active: max off-diagonal |inv(S)| = {max_offdiag} exceeds lambda = {lambda}")]
    ConstraintActive { max_offdiag: f64, lambda: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: non-numeric cell {value:?} at row {row}, column {col}")]
    NonNumericCell {
        path: PathBuf,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("{path}: file contains no data rows")]
    EmptyFile { path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}
