use thiserror::Error;

/// Errors raised by the statistical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample entry {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("observation {index} equals the null median exactly; its sign is undefined")]
    ZeroEntry { index: usize },
    #[error("invalid test spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("group enumeration supports q <= {max}, got q = {q}")]
    TooLarge { q: usize, max: usize },
    #[error("probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("scale {value} at index {index} must be positive and finite")]
    InvalidSigma { index: usize, value: f64 },
    #[error("correlation {value} is outside the supported range {range}")]
    InvalidRho { value: f64, range: &'static str },
    #[error("tail index r = {r} is outside 0..={max} for q = {q}")]
    InvalidR { r: usize, q: usize, max: usize },
    #[error("quadrature order {n} is outside 1..={max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("integrand is not finite at node {node}")]
    NonFiniteEvaluation { node: f64 },
    #[error("at least one replication is required")]
    NoReplications,
}

pub type Result<T> = std::result::Result<T, Error>;
