use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("unsupported norm order {0}: spatial order must be >= -1")]
    UnsupportedOrder(f64),

    #[error("k = 0 passed to the oscillatory mode solver; use the steady solver")]
    WrongEntryPoint,

    #[error("incompatible data at time mode k = {k}: mean over the slab is {mean:e}")]
    Incompatible { k: i64, mean: f64 },

    #[error("mode (k = {k}, xi = {xi:?}) is excluded from this symbol")]
    ExcludedMode { k: i64, xi: [i64; 2] },

    #[error("missing mode (k = {k}, xi = {xi:?}) in solution set")]
    IncompleteModes { k: i64, xi: [i64; 2] },

    #[error("degenerate deformation: {0}")]
    DegenerateDeformation(String),

    #[error("fixed-point iteration diverged at step {step}: {reason}")]
    Divergence { step: usize, reason: String },

    #[error("singular linear system for mode (k = {k}, xi = {xi:?})")]
    Singular { k: i64, xi: [i64; 2] },

    #[error("invalid parameters: {0}")]
    Parameters(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
