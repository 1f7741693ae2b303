use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("discriminant {0} is not valid here: {1}")]
    BadDiscriminant(String, &'static str),
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not real (negative discriminant)")]
    NotReal,
    #[error("form {0} is not indefinite and irreducible")]
    NotIndefinite(String),
    #[error("form is not primitive")]
    NotPrimitive,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("({t}, {u}) does not solve t^2 - {d} u^2 = 4")]
    NotPellSolution { t: String, u: String, d: String },
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("bad input: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),
    #[error("iteration cap reached in {0}")]
    IterationCap(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
