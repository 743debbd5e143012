use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at nonpositive integer {0}")]
    Pole(f64),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("connection formula needs gamma at a pole")]
    Degenerate,
    #[error("quadrature depth exhausted (best estimate {value}, error {error:e})")]
    DepthExhausted { value: f64, error: f64 },
    #[error("identity violated: {relation} (deviation {deviation:e})")]
    IdentityViolation { relation: String, deviation: f64 },
    #[error("property violated: {0}")]
    PropertyViolation(String),
    #[error("field does not vanish near x_n = 0")]
    SupportViolation,
    #[error("field support exceeds radius {0}")]
    SupportExceeds(f64),
    #[error("trace term vanishes")]
    ZeroTrace,
    #[error("tensor quadrature does not support dimension {0}")]
    UnsupportedDimension(usize),
    #[error("two facets are equidistant at the evaluation point")]
    FacetTie,
    #[error("evaluation at the origin")]
    Origin,
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error("bracketing failed: {0}")]
    Bracketing(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
