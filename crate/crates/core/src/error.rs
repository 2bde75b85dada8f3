use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the curvature engine and the verification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("jet order {0} outside the supported range 0..=4")]
    OrderOutOfRange(usize),

    #[error("jet mismatch: (dim {dim_a}, order {order_a}) combined with (dim {dim_b}, order {order_b})")]
    JetMismatch {
        dim_a: usize,
        order_a: usize,
        dim_b: usize,
        order_b: usize,
    },

    #[error("domain error: {function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },

    #[error("multi-index of degree {degree} exceeds jet order {order}")]
    DegreeExceedsOrder { degree: usize, order: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },

    #[error("cannot contract slots {a} and {b}: both have the same variance")]
    SameVariance { a: usize, b: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("point {point:?} lies outside the domain of {metric}")]
    OutsideDomain { metric: String, point: Vec<f64> },

    #[error("{what} needs jet order {needed}, have {have}")]
    InsufficientOrder {
        what: &'static str,
        needed: usize,
        have: usize,
    },

    #[error("{what} needs dimension at least {needed}, have {have}")]
    InsufficientDimension {
        what: &'static str,
        needed: usize,
        have: usize,
    },

    #[error("invalid metric spec: {0}")]
    InvalidSpec(String),

    #[error("could not sample a valid point for {metric} after {attempts} attempts")]
    SamplingFailed { metric: String, attempts: usize },

    #[error("covector is null under the metric (squared norm {norm_sq})")]
    NullCovector { norm_sq: f64 },

    #[error("velocity covector is not timelike (u^2 = {norm_sq})")]
    NotTimelike { norm_sq: f64 },

    #[error("unknown tolerance `{0}`")]
    UnknownTolerance(String),
}

pub type Result<T> = core::result::Result<T, Error>;
