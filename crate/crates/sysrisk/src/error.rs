//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension mismatch between inputs (matrix shape, vector lengths).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A balance sheet with non-positive equity (total assets <= total liabilities).
    #[error("insolvent balance sheet at {0}: total assets must exceed total liabilities")]
    InsolventBalanceSheet(usize),

    /// Input file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A banking system failed validation.
    #[error("invalid banking system: {0}")]
    InvalidSystem(String),

    /// The LP/MILP instance has no feasible point.
    #[error("problem is infeasible")]
    Infeasible,

    /// Numerical failure inside the simplex (singular basis, lost feasibility).
    #[error("numerical failure in solver: {0}")]
    Numerical(String),

    /// Instance too large for an exhaustive routine.
    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
