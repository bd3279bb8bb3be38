use thiserror::Error;

use crate::hypergraph::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(#[from] Violation),

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("edge probability {probability} exceeds 1 for composition {composition:?} at N = {n}")]
    ProbabilityTooLarge {
        composition: Vec<usize>,
        probability: f64,
        n: usize,
    },

    #[error("hypergraph has mixed edge sizes; the reduced operator needs a uniform k (use the full operator)")]
    NonUniform,

    #[error("eigensolver did not converge after {restarts} restarts; best residuals {residuals:?}")]
    NoConvergence { restarts: usize, residuals: Vec<f64> },

    #[error("dense eigendecomposition failed: {0}")]
    DenseEigen(String),

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("need {needed} informative eigenpairs, found {found}")]
    InsufficientPairs { needed: usize, found: usize },

    #[error("brute-force overlap supports q <= 8 (got {0}); use an assignment-problem matcher instead")]
    TooManyGroups(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("mean degree is zero; transition matrix undefined")]
    ZeroDegree,
}

pub type Result<T> = std::result::Result<T, Error>;
