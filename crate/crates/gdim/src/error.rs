//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("node index {index} out of range for a graph on {bound} nodes")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("negative weight {value} at entry ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("entry ({row}, {col}) has weight {value}, which is not a nonnegative integer")]
    NonIntegerWeight { row: usize, col: usize, value: f64 },

    #[error("symmetric graph must be square, got {rows} x {cols}")]
    SymmetricShape { rows: usize, cols: usize },

    #[error("symmetric graph has conflicting weights at ({row}, {col}) and ({col}, {row})")]
    SymmetricConflict { row: usize, col: usize },

    #[error("graph has no edges; {context}")]
    EmptyGraph { context: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Bernoulli sampling needs every edge probability <= 1, but max is {max_p}")]
    BernoulliInfeasible { max_p: f64 },

    #[error("problem size {n} exceeds the dense-path guard of {limit}")]
    SizeGuard { n: usize, limit: usize },

    #[error("matrix columns are not orthonormal (max deviation {deviation})")]
    NotOrthonormal { deviation: f64 },

    #[error(
        "eigensolver did not converge: {converged} of {requested} pairs \
         within the iteration budget"
    )]
    NonConvergence { converged: usize, requested: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
