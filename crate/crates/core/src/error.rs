use crate::value::Value;

/// Errors raised across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("negative bid {value} by bidder {bidder} on item {item}")]
    NegativeBid { bidder: usize, item: usize, value: Value },
    #[error("{what}: size {size} exceeds the exhaustive limit {limit}")]
    SizeGuard { what: &'static str, size: usize, limit: usize },
    #[error("valuation kind {0} has no XOS representation here")]
    NotXos(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("k = {0} is not supported (expected a power of two)")]
    UnsupportedK(usize),
    #[error("no deviation: {0}")]
    NoDeviation(String),
    #[error("trace does not qualify: {0}")]
    NotQualifying(String),
    #[error("trace corrupted at step {step}: {detail}")]
    TraceCorrupted { step: usize, detail: String },
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] crate::lp::LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
