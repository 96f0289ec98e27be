use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid base matrix: {0}")]
    InvalidMatrix(String),

    #[error("column index {index} out of range 1..={n}")]
    ColumnOutOfRange { index: usize, n: usize },

    #[error("erasing columns leaves check row {row} with no edges")]
    DegenerateCheck { row: usize },

    #[error("invalid pruning pattern: {0}")]
    InvalidPattern(String),

    #[error("pattern too short: need {needed} columns, have {available}")]
    PatternTooShort { needed: usize, available: usize },

    #[error("invalid threshold query: {0}")]
    InvalidQuery(String),

    #[error("density evolution already converges at the lower bracket end ({0} dB)")]
    BracketTooHigh(f64),

    #[error("search infeasible: {0}")]
    SearchInfeasible(String),

    #[error("parity part of the lifted matrix is singular (rank {rank} of {size})")]
    SingularParity { rank: usize, size: usize },

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
