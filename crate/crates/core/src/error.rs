use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Sampled generic points did not agree. `histogram` is the per-prime
    /// diagnostic dump.
    #[error("consensus failure for {context}\n{histogram}")]
    Consensus { context: String, histogram: String },

    #[error("interpolation mismatch for {context}: {detail}")]
    Interpolation { context: String, detail: String },

    #[error("route disagreement for dimension vector {dim}: {detail}")]
    RouteDisagreement { dim: String, detail: String },

    #[error("matrix is not unitriangular: {0}")]
    NotUnitriangular(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),

    #[error("hall cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
