use thiserror::Error;

use crate::group::GroupElement;
use crate::measure::Measure;
use crate::orthopoly::Family;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("eigensolver did not converge for {family:?} Jacobi matrix of size {m} after {iterations} iterations")]
    QuadratureNonConvergence {
        family: Family,
        m: usize,
        iterations: usize,
    },

    #[error("symmetric eigensolver did not converge after {iterations} iterations (n = {n})")]
    EigenNonConvergence { n: usize, iterations: usize },

    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("group elements of different variants cannot be composed: {0:?} and {1:?}")]
    MixedVariants(GroupElement, GroupElement),

    #[error("unsupported group/measure pair: {group:?} with {measure:?}")]
    UnsupportedPair { group: GroupElement, measure: Measure },

    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("sample point {value} at index {index} lies outside the support of {family:?}")]
    OutsideSupport {
        family: Family,
        index: usize,
        value: f64,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("non-finite sample value at index {0}")]
    NonFiniteSample(usize),

    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),

    #[error("Gram matrix is numerically singular (condition estimate {condition:e})")]
    SingularGram { condition: f64 },

    #[error("rejection sampler acceptance rate {rate:.4} is below 1%; choose a smaller coefficient scale")]
    LowAcceptance { rate: f64 },

    #[error("target density is negative ({value:e}) at x = {x} on the positivity grid")]
    NegativeTarget { x: f64, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
