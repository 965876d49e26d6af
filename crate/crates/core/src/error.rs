use thiserror::Error;

/// Errors produced by the numerical routines and their validators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("positivity violated: minimum eigenvalue {min_eigenvalue:.3e} below -{tolerance:.0e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("unit trace violated: trace is {trace:.12}")]
    TraceNotOne { trace: f64 },

    #[error("POVM completeness violated: elements sum to identity only within {deviation:.3e} (tolerance 1e-9)")]
    Incomplete { deviation: f64 },

    #[error("POVM element {index} is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    ElementNotPositive { index: usize, min_eigenvalue: f64 },

    #[error("probability vector invalid: {0}")]
    InvalidProbability(String),

    #[error("stochastic map invalid: {0}")]
    InvalidStochasticMap(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("solver did not converge after {iterations} iterations (best gap {best_gap:.3e})")]
    NonConvergence { iterations: usize, best_gap: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
