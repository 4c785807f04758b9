use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arm index {arm} out of range for {arms} arms")]
    ArmIndex { arm: usize, arms: usize },

    #[error("offline dataset is empty (no samples on any arm): {0}")]
    DegenerateOffline(String),

    #[error("configuration mismatch: {0}")]
    Config(String),

    #[error("cannot aggregate an empty list of run records")]
    EmptyAggregate,

    #[error("reward table parse error at row {row}, column {col}: {msg}")]
    TableParse { row: usize, col: usize, msg: String },

    #[error("reward table entry at row {row}, column {col} is {found:?}; entries must be 0 or 1")]
    NonBinaryEntry {
        row: usize,
        col: usize,
        found: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
