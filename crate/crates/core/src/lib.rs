//! Numeric operator calculus for deformed derivatives.
//!
//! A multiplicative operator is determined by its point map
//! `x -> omega(x)`; the deformed derivative it induces is the difference
//! quotient `(f(omega(x)) - f(x)) / (omega(x) - x)`, which specializes to
//! the finite-difference derivative (translations), the q-derivative
//! (dilations) and `d/dx` in the vanishing-deformation limit.
//!
//! The crate provides:
//!
//! * [`operator`]: the operator family (translation, dilation, power
//!   deformation, two-parameter), with exact inverses, closed-form
//!   composition and orbit iteration
//! * [`expr`]: a small expression parser so functions can be given as text
//! * [`calculus`]: the deformed derivative, bracket numbers, and the
//!   inverse derivative as a truncated operator series
//! * [`eigen`]: eigenfunctions with eigenvalue one as truncated products
//!   and nested series, plus the scaled-eigenvalue and invariance checks
//! * [`mobius`]: the 2x2 matrix factorization of the fractional-linear
//!   map and its agreement with the operator composition
//! * [`verify`]: seeded, mutation-sensitive verification suites over all
//!   of the above

pub mod calculus;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod mobius;
pub mod operator;
pub mod verify;

pub use calculus::{
    bracket_number, deformed_derivative, inverse_derivative, inverse_derivative_fn,
    inverse_derivative_stats, DeformedDerivative, DerivativeConfig, InverseConfig, InverseEval,
    RealFunction,
};
pub use eigen::{
    eigen_product, eigen_residual, eigen_series, function_invariance_check,
    invariant_product_check, scaled_eigen_check, EigenfunctionEvaluator, InvarianceCheck,
    ProductEval, SeriesEval,
};
pub use error::{Error, EvalError, Result};
pub use expr::{parse, Expr, ParseError};
pub use mobius::{factor_action_check, MobiusMatrix};
pub use operator::{two_parameter_mu_limit, ComposedOperator, OmegaOperator, Orbit};
