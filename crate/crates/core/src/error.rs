use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("site {site} out of range for {replicas} replicas")]
    SiteOutOfRange { site: usize, replicas: usize },

    #[error("rank must be at least 1, got {0}")]
    InvalidRank(usize),

    #[error("replica count must be at least 1")]
    NoReplicas,

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension {dim} exceeds the dense threshold {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("no singlets: {0}")]
    EmptyCode(String),

    #[error("numerical kernel has dimension {numerical}, algebraic multiplicity is {algebraic}")]
    KernelMismatch { numerical: usize, algebraic: usize },

    #[error("rank deficient input: vector {index} has residual norm {residual:e}")]
    RankDeficient { index: usize, residual: f64 },

    #[error("operator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("shape with {boxes} boxes exceeds the enumeration guard of {limit}")]
    EnumerationGuard { boxes: usize, limit: usize },

    #[error("{0}")]
    Precondition(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
