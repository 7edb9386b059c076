//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while evaluating an expression or a wrapped real function.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("ln of non-positive value {0}")]
    LogNonPositive(f64),
    #[error("square root of negative value {0}")]
    SqrtNegative(f64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{base}^{exponent} is not a real number")]
    PowUndefined { base: f64, exponent: f64 },
    #[error("evaluation produced a NaN intermediate")]
    NotANumber,
}

/// Errors raised by operator, calculus, eigenfunction and Mobius operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The point map (or its inverse) is not real-valued at this point.
    #[error("domain error at x = {x}: {reason}")]
    Domain { x: f64, reason: &'static str },
    /// Construction parameters violate an operator invariant.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    /// No closed-form composition exists for this pair of operators.
    #[error("incompatible operators: {0}")]
    IncompatibleOperators(String),
    /// The truncated series never met its tail criterion.
    #[error("series diverged after {terms} terms (last term {last_term:e})")]
    SeriesDiverged { terms: usize, last_term: f64 },
    /// A denominator came within rounding distance of zero.
    #[error("pole: denominator {denominator:e} within tolerance of zero")]
    Pole { denominator: f64 },
    /// The infinite product never met its stopping criterion.
    #[error("product did not converge ({factors} factors inspected)")]
    NotConverged { factors: usize },
    #[error("singular matrix: ad - bc = 0")]
    SingularMatrix,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T> = std::result::Result<T, Error>;
