use thiserror::Error;

/// Errors raised by field construction, operators, models and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("operator undefined: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("expected a {expected} state, got {found}")]
    WrongVariant {
        expected: &'static str,
        found: &'static str,
    },

    #[error("noise index {index} out of range (basis has {len} fields)")]
    NoiseIndex { index: usize, len: usize },

    #[error("noise coefficients are not summable: tail bound {tail}")]
    DivergentBasis { tail: f64 },

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
