use thiserror::Error;

/// Errors surfaced by construction, certification, decoding and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix has rank {rank} but {rows} rows; remove redundant checks first")]
    RankDeficient { rank: usize, rows: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} exceeds budget of {budget}")]
    BudgetExceeded { what: String, budget: u64 },

    #[error("strategy not applicable: {0}")]
    StrategyInapplicable(String),

    #[error("no correction of weight <= {cap} matches the observed syndrome")]
    DecodeFailure { cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
