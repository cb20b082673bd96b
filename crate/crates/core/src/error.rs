use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value in input at position {0}")]
    NonFinite(usize),

    #[error("codebook mismatch: value {0} has no code")]
    CodebookMismatch(f64),

    #[error("invalid level {level} (supported 1..={max})")]
    InvalidLevel { level: u32, max: u32 },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("no numeric rows in column {0}")]
    NoNumericRows(String),

    #[error("bad column: {0}")]
    BadColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}
