use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("metric kind `{0}` has no Minkowski norm on an ambient space")]
    NoAmbientNorm(&'static str),

    #[error("vertex index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("scales must be nonempty and sorted ascending")]
    UnsortedScales,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("minor enumeration limited to min(rows, cols) <= {limit}, got {size}")]
    MinorGuardExceeded { size: usize, limit: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("cannot factor cofactor {0}: exceeds 64 bits after trial division")]
    FactorizationTooLarge(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input files rather than bad domain values.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Json(_) | Error::Schema(_))
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidMetric(_) => "invalid_metric",
            Error::NoAmbientNorm(_) => "no_ambient_norm",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::EmptyCloud => "empty_cloud",
            Error::UnsortedScales => "unsorted_scales",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::MinorGuardExceeded { .. } => "minor_guard_exceeded",
            Error::NotPrime(_) => "not_prime",
            Error::FactorizationTooLarge(_) => "factorization_too_large",
            Error::Schema(_) => "schema",
            Error::Json(_) => "json",
        }
    }
}
