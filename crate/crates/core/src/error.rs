use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("spectrum exceeds target length: {bins} bins for output length {out_len}")]
    SpectrumTooLong { bins: usize, out_len: usize },

    #[error("cutoff bin {cutoff} beyond spectrum of {bins} bins")]
    CutoffOutOfRange { cutoff: usize, bins: usize },

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("zero variance {0}")]
    ZeroVariance(String),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best_value})")]
    NoConvergence {
        iterations: usize,
        best_value: f64,
        best_point: Vec<f64>,
    },

    #[error("non-finite loss in batch {0}")]
    NonFiniteLoss(usize),

    #[error("empty split: {0}")]
    EmptySplit(String),

    #[error("csv error at row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
