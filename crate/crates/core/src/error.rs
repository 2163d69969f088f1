use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("expectation value has imaginary part {0:e}; observable is not Hermitian")]
    NonHermitian(f64),

    #[error("invalid qubit count {0}")]
    InvalidQubitCount(usize),

    #[error("invalid site {site} for a {qubits}-qubit register")]
    InvalidSite { site: usize, qubits: usize },

    #[error("gate sites must be distinct (got {0} twice)")]
    RepeatedSite(usize),

    #[error("expected {expected} parameters, got {found}")]
    ParameterArity { expected: usize, found: usize },

    #[error("unsupported system size {size} (limit {limit})")]
    UnsupportedSize { size: usize, limit: usize },

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("term {term} cannot be read out from a record measured in basis {basis}")]
    BasisMismatch { term: String, basis: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
