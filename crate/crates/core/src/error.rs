use std::fmt;

use crate::Rational;

/// Where a positive bidiagonal factorization broke down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorStage {
    /// Pivot of the LDU split at the given 1-based diagonal index.
    Pivot { index: usize },
    /// Subdiagonal multiplier of lower factor `factor` (1-based) at row `row`.
    Lower { factor: usize, row: usize },
    /// Superdiagonal multiplier of upper factor `factor` (1-based) at column `col`.
    Upper { factor: usize, col: usize },
}

impl fmt::Display for FactorStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorStage::Pivot { index } => write!(f, "pivot d_{index}"),
            FactorStage::Lower { factor, row } => write!(f, "lower factor {factor}, row {row}"),
            FactorStage::Upper { factor, col } => write!(f, "upper factor {factor}, column {col}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("capacity exceeded: {what} needs n = {n}, cap is {cap}")]
    Capacity { what: &'static str, n: usize, cap: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("matrix is not banded totally positive: {stage} has value {value}")]
    NotBtp { stage: FactorStage, value: Rational },

    #[error("characteristic polynomial has a repeated root")]
    MultipleEigenvalue,

    #[error("boundary system at eigenvalue {index} has full rank; raise the precision")]
    SpectralInconsistency { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
