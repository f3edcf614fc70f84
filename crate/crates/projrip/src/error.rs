//! Error type shared by all modules.

use thiserror::Error;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix dimensions incompatible with the requested operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Dimension arguments violate a precondition (e.g. s >= N, m >= N^2).
    #[error("bad dimensions: {0}")]
    BadDimensions(String),

    /// Numerical rank below the requested column count.
    #[error("rank deficient: smallest R diagonal {0:.3e} below tolerance")]
    RankDeficient(f64),

    /// Input matrix not symmetric within tolerance.
    #[error("not symmetric: ||S - S^T||_F = {0:.3e} exceeds tolerance")]
    NotSymmetric(f64),

    /// A non-finite entry (NaN/Inf) reached a public operation.
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    /// Two subspaces coincided numerically after repeated resampling.
    #[error("degenerate pair: subspaces coincide after {0} resample attempts")]
    DegeneratePair(usize),

    /// An iterative minimization failed its convergence tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// No measurement count m < N^2 satisfies the requested target.
    #[error("unsatisfiable: even m = {0} fails eps target {1}")]
    Unsatisfiable(usize, f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A persisted operator file failed validation.
    #[error("bad operator file: {0}")]
    BadFile(String),
}
