use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0}: input must be positive")]
    ZeroInput(&'static str),
    #[error("zero vector is not allowed")]
    ZeroVector,
    #[error("{what} is not supported for (n, m) = ({n}, {m})")]
    UnsupportedDimension { what: &'static str, n: usize, m: usize },
    #[error("radius {0} must be below 1/2")]
    RadiusTooLarge(String),
    #[error("vector {0:?} is not primitive")]
    NotPrimitive(Vec<i64>),
    #[error("invalid set specification: {0}")]
    InvalidSpec(String),
    #[error("approximation function value psi({q}) = {value} is outside [0, 1/2)")]
    PsiOutOfRange { q: u64, value: String },
    #[error("cutoff {q} exceeds the function's domain bound {q_max}")]
    BeyondDomain { q: u64, q_max: u64 },
    #[error("mismatched set families: {0}")]
    MixedFamilies(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pins file: {0}")]
    Pins(String),
}
