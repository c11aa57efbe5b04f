use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A mode transformation failed the `U†U = I` check.
    #[error("matrix is not unitary (max |U†U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("permanent oracle supports at most {max} photons, got {photons}")]
    OracleLimit { photons: usize, max: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("parameter {param} enters {count} phase terms; sequential optimization needs exactly one")]
    UnsupportedSharing { param: usize, count: usize },

    #[error("expected {expected} probe probabilities, got {found}")]
    ProbeCount { expected: usize, found: usize },

    #[error("probability {value} at probe {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
