use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("theta = {0} is outside the admissible region")]
    ThetaOutsideRegion(Complex64),

    #[error("lambda = {lambda} is a branch point (threshold {threshold})")]
    BranchPoint { lambda: Complex64, threshold: f64 },

    #[error(
        "lambda = {lambda} lies on the cut of threshold {threshold}; an approach side is required"
    )]
    OnBranchCut { lambda: Complex64, threshold: f64 },

    #[error("grid step {step} is coarser than the limit {limit}")]
    GridTooCoarse { step: f64, limit: f64 },

    #[error("grid too short: {0}")]
    GridTooShort(String),

    #[error("potential support radius {support} exceeds the scaling radius {radius}")]
    SupportBeyondScalingRadius { support: f64, radius: f64 },

    #[error("divergent tail: last interval carries {fraction:e} of the integral")]
    DivergentTail { fraction: f64 },

    #[error("matrix is numerically singular at {0}")]
    Singular(Complex64),

    #[error("{what} of size {size} exceeds the dense limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("unsupported discretization: {0}")]
    Unsupported(String),

    #[error("linear algebra backend failure: {0}")]
    Backend(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
