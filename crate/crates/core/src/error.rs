use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("parameter index {index} out of bounds for {len} parameters")]
    ParameterIndex { index: usize, len: usize },

    /// A state became non-finite or exceeded the divergence ceiling.
    #[error("numerical divergence at t = {time}")]
    Divergence { time: f64 },

    #[error("silhouettes need at least 2 clusters, found {clusters}")]
    UndefinedSilhouette { clusters: usize },

    #[error("all feature vectors are identical; no clustering radius exists")]
    DegenerateFeatures,

    #[error("feature {index} of vector {row} is not finite")]
    NonFiniteFeature { row: usize, index: usize },

    #[error("set distance returned {0}, expected a finite non-negative value")]
    InvalidDistance(f64),

    #[error("pairwise working set of {required} bytes exceeds budget of {budget} bytes")]
    MemoryBudget { required: u128, budget: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
