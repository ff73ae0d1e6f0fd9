use thiserror::Error;

use crate::distribution::Label;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("posterior undefined at y = {y}: marginal density is zero")]
    UndefinedPosterior { y: f64 },

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("distribution not certified good: {0}")]
    NotCertified(String),

    #[error("dimension {dim} exceeds the dense quadrature limit of {max}; use Monte Carlo")]
    DimensionLimit { dim: usize, max: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("point ({label}, {y}) is outside the map domain")]
    OutsideDomain { label: Label, y: f64 },

    #[error("map is not a bijection: {0}")]
    NotBijective(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("transition matrix is reducible; stationary distribution is not unique")]
    ReducibleChain,

    #[error("initial distribution is not stationary (max deviation {deviation:e})")]
    NonStationaryInitial { deviation: f64 },

    #[error("expected mean count {mean} exceeds the series guard {max}")]
    HorizonTooLarge { mean: f64, max: f64 },

    #[error("too few events: {count} < {min}")]
    TooFewEvents { count: usize, min: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
