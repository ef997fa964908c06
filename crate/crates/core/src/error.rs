use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("column {0} of the dictionary has zero norm")]
    ZeroColumn(usize),

    #[error("index {0} flagged as both positively and negatively saturated")]
    ContradictoryFlags(usize),

    #[error("overlapping saturation sets at index {0}")]
    OverlappingSets(usize),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
