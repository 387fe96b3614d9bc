use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parity-check matrix is rank deficient: rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },

    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("inconsistent dimensions in {path}: {msg}")]
    Dimensions { path: PathBuf, msg: String },

    #[error("exhaustive search over 2^{k} codewords refused (limit 2^{limit})")]
    Capacity { k: usize, limit: usize },

    #[error("pattern frontier exceeded its cap of {cap} nodes")]
    FrontierOverflow { cap: usize },

    #[error(
        "alpha*epsilon = {target:e} cannot be resolved with {samples} samples; need at least {min_samples}"
    )]
    InsufficientResolution {
        target: f64,
        samples: usize,
        min_samples: u64,
    },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
