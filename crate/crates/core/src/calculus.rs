//! The deformed derivative, its inverse via a truncated operator series,
//! and the position-dependent bracket numbers.
//!
//! For a multiplicative operator with point map `omega`, the deformed
//! derivative of `f` at `x` is the difference quotient
//!
//! ```text
//! D f(x) = (f(omega(x)) - f(x)) / (omega(x) - x)
//! ```
//!
//! It reduces to the finite-difference derivative for translations, to the
//! q-derivative for dilations, and to `d/dx` as the deformation vanishes.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::operator::{kth_root, OmegaOperator};
use std::sync::Arc;

type DynFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A real-valued function of one variable, with an optional analytic
/// derivative used only at singular points of the difference quotient.
#[derive(Clone)]
pub struct RealFunction {
    f: Arc<DynFn>,
    derivative: Option<Arc<DynFn>>,
}

impl RealFunction {
    /// Wraps an infallible closure.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(move |x| Ok(f(x))),
            derivative: None,
        }
    }

    /// Wraps a fallible closure (series evaluations, nested derivatives).
    pub fn fallible(f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            derivative: None,
        }
    }

    /// Wraps a parsed expression; evaluation errors propagate.
    pub fn from_expr(expr: Expr) -> Self {
        Self {
            f: Arc::new(move |x| expr.eval(x).map_err(Error::from)),
            derivative: None,
        }
    }

    /// `x^n` with its analytic derivative attached.
    pub fn monomial(n: u32) -> Self {
        Self::from_fn(move |x| x.powi(n as i32)).with_derivative(move |x| {
            if n == 0 {
                0.0
            } else {
                f64::from(n) * x.powi(n as i32 - 1)
            }
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(move |_| c).with_derivative(|_| 0.0)
    }

    pub fn identity() -> Self {
        Self::from_fn(|x| x).with_derivative(|_| 1.0)
    }

    /// Attaches an analytic classical derivative for the singular-point
    /// fallback.
    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(move |x| Ok(df(x))));
        self
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        (self.f)(x)
    }

    /// Classical derivative: analytic if attached, otherwise a central
    /// difference with the given step.
    pub fn classical_derivative(&self, x: f64, fd_step: f64) -> Result<f64> {
        match &self.derivative {
            Some(df) => df(x),
            None => Ok((self.eval(x + fd_step)? - self.eval(x - fd_step)?) / (2.0 * fd_step)),
        }
    }
}

impl std::fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFunction")
            .field("derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Settings for the difference quotient near fixed points of the map.
///
/// The quotient is 0/0 where `omega(x) = x` (for example x = 0 under a
/// dilation); below `singular_eps` the classical derivative is returned
/// instead, which is the analytic limit of the quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeConfig {
    /// Threshold on `|omega(x) - x|` that triggers the fallback.
    pub singular_eps: f64,
    /// Central-difference step used when no analytic derivative is attached.
    pub fd_step: f64,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        Self {
            singular_eps: 1e-12,
            fd_step: 1e-6,
        }
    }
}

/// Truncation policy for the inverse-derivative series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseConfig {
    pub max_terms: usize,
    /// The series stops once `|term| <= tail_tol * max(1, |partial sum|)`.
    ///
    /// The scale is flat below 1 so that evaluations at nearby points
    /// truncate at the same orbit depth; a sum-tracking scale would let
    /// slowly decaying tails truncate at mismatched depths, which ruins
    /// difference quotients of the series.
    pub tail_tol: f64,
}

impl Default for InverseConfig {
    fn default() -> Self {
        Self {
            max_terms: 10_000,
            tail_tol: 1e-12,
        }
    }
}

/// Evaluates the deformed derivative of `f` at `x`.
pub fn deformed_derivative(
    op: &OmegaOperator,
    f: &RealFunction,
    x: f64,
    cfg: &DerivativeConfig,
) -> Result<f64> {
    let wx = op.apply(x)?;
    let w = wx - x;
    if w.abs() < cfg.singular_eps {
        return f.classical_derivative(x, cfg.fd_step);
    }
    Ok((f.eval(wx)? - f.eval(x)?) / w)
}

/// An operator bound to a function, evaluating its deformed derivative
/// pointwise.
#[derive(Debug, Clone)]
pub struct DeformedDerivative {
    op: OmegaOperator,
    f: RealFunction,
    cfg: DerivativeConfig,
}

impl DeformedDerivative {
    pub fn new(op: OmegaOperator, f: RealFunction) -> Self {
        Self {
            op,
            f,
            cfg: DerivativeConfig::default(),
        }
    }

    pub fn with_config(mut self, cfg: DerivativeConfig) -> Self {
        self.cfg = cfg;
        self
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        deformed_derivative(&self.op, &self.f, x, &self.cfg)
    }

    /// The derivative itself as a function object, e.g. for iterating D.
    pub fn into_fn(self) -> RealFunction {
        RealFunction::fallible(move |x| self.eval(x))
    }
}

/// The bracket number `[[n]](x)`: the finite geometric sum
/// `1 + r + ... + r^(n-1)` with `r = (1 + lambda*k*x^k)^(-1/k)`.
///
/// Equals the ratio `(r^n - 1)/(r - 1)` when `r != 1` and equals `n` when
/// `r = 1`; it satisfies `D x^n = [[n]](x) * x^(n-1)` for the power
/// deformation.
pub fn bracket_number(n: u32, lambda: f64, k: u32, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidOperator("bracket number needs k >= 1".into()));
    }
    let base = 1.0 + lambda * f64::from(k) * x.powi(k as i32);
    if base <= 0.0 || base.is_nan() {
        return Err(Error::Domain {
            x,
            reason: "1 + lambda*k*x^k must be positive for a real principal root",
        });
    }
    let r = 1.0 / kth_root(base, k);
    let mut sum = 0.0;
    let mut power = 1.0;
    for _ in 0..n {
        sum += power;
        power *= r;
    }
    Ok(sum)
}

/// A converged inverse-derivative evaluation with its truncation stats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseEval {
    pub value: f64,
    pub terms: usize,
    pub last_term: f64,
}

/// Evaluates the inverse deformed derivative of `f` at `x` as the series
/// `sum_j g(omega^j(x))` with `g(y) = (y - omega(y)) * f(y)`, truncated
/// per `cfg`.
///
/// On convergent inputs `D (D^-1 f) = f` holds up to the series tolerance.
/// Orbits that fail to contract report [`Error::SeriesDiverged`].
pub fn inverse_derivative(
    op: &OmegaOperator,
    f: &RealFunction,
    x: f64,
    cfg: &InverseConfig,
) -> Result<f64> {
    inverse_derivative_stats(op, f, x, cfg).map(|eval| eval.value)
}

/// As [`inverse_derivative`], also reporting the term count and the last
/// term taken.
pub fn inverse_derivative_stats(
    op: &OmegaOperator,
    f: &RealFunction,
    x: f64,
    cfg: &InverseConfig,
) -> Result<InverseEval> {
    let mut sum = 0.0;
    let mut point = x;
    let mut last_term = f64::NAN;
    for terms in 1..=cfg.max_terms {
        let next = op.apply(point)?;
        let term = (point - next) * f.eval(point)?;
        sum += term;
        last_term = term;
        if !term.is_finite() || !sum.is_finite() {
            return Err(Error::SeriesDiverged { terms, last_term: term });
        }
        if term.abs() <= cfg.tail_tol * sum.abs().max(1.0) {
            return Ok(InverseEval {
                value: sum,
                terms,
                last_term: term,
            });
        }
        point = next;
    }
    Err(Error::SeriesDiverged {
        terms: cfg.max_terms,
        last_term,
    })
}

/// The inverse derivative as a function object, closing over `op`, `f`
/// and the truncation policy.
pub fn inverse_derivative_fn(
    op: OmegaOperator,
    f: RealFunction,
    cfg: InverseConfig,
) -> RealFunction {
    RealFunction::fallible(move |x| inverse_derivative(&op, &f, x, &cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::EvalError;
    use crate::expr::parse;

    fn dilation(q: f64) -> OmegaOperator {
        OmegaOperator::dilation(q).unwrap()
    }

    fn derive(op: &OmegaOperator, f: &RealFunction, x: f64) -> f64 {
        deformed_derivative(op, f, x, &DerivativeConfig::default()).unwrap()
    }

    #[test]
    fn derivative_examples() {
        // brute force (f(qx) - f(x)) / ((q-1)x) = (36 - 9) / 3
        let sq = RealFunction::monomial(2);
        assert_eq!(derive(&dilation(2.0), &sq, 3.0), 9.0);

        // ((1.5)^2 - 1) / 0.5: the finite-difference derivative
        let shift = OmegaOperator::translation(0.5).unwrap();
        assert_eq!(derive(&shift, &sq, 1.0), 2.5);

        // (0.25 - 1) / (0.5 - 1) matches the bracket number route below
        let p = OmegaOperator::power_deformation(1.0, 1).unwrap();
        assert_eq!(derive(&p, &sq, 1.0), 1.5);
    }

    #[test]
    fn derivative_axioms_all_kinds() {
        let ops = [
            OmegaOperator::translation(0.5).unwrap(),
            dilation(0.7),
            OmegaOperator::power_deformation(0.3, 2).unwrap(),
            OmegaOperator::two_parameter(0.3, 1.5).unwrap(),
        ];
        for op in &ops {
            for i in 0..20 {
                let x = 0.1 + 0.09 * i as f64;
                assert_eq!(derive(op, &RealFunction::identity(), x), 1.0, "{op} at {x}");
                assert_eq!(derive(op, &RealFunction::constant(4.2), x), 0.0);
            }
        }
    }

    #[test]
    fn singular_point_falls_back_to_classical() {
        // x = 0 is a fixed point of every dilation
        let sq = RealFunction::monomial(2);
        assert_eq!(derive(&dilation(0.5), &sq, 0.0), 0.0);
        let cube = RealFunction::from_expr(parse("x^3").unwrap());
        // central difference at x = 1 under the identity-like map
        let tiny = OmegaOperator::power_deformation(1e-15, 1).unwrap();
        let d = derive(&tiny, &cube, 1.0);
        assert!((d - 3.0).abs() < 1e-9, "got {d}");
    }

    #[test]
    fn bracket_examples() {
        // single term r^0
        assert_eq!(bracket_number(1, 0.7, 2, 0.5).unwrap(), 1.0);
        // 1 + 1/(1 + lambda*x) at lambda = 1, x = 1
        assert_eq!(bracket_number(2, 1.0, 1, 1.0).unwrap(), 1.5);
        // r = 1 gives the classical n
        assert_eq!(bracket_number(3, 0.0, 1, 123.0).unwrap(), 3.0);
        // empty sum
        assert_eq!(bracket_number(0, 0.5, 1, 1.0).unwrap(), 0.0);
        assert!(bracket_number(2, -1.0, 1, 1.0).is_err());
    }

    #[test]
    fn bracket_matches_monomial_derivative() {
        for &(lambda, k) in &[(0.5, 1u32), (-0.2, 2), (0.2, 3)] {
            for n in 1..=6u32 {
                for &x in &[0.3, 0.7, 1.1] {
                    let op = OmegaOperator::power_deformation(lambda, k).unwrap();
                    let lhs = derive(&op, &RealFunction::monomial(n), x);
                    let rhs =
                        bracket_number(n, lambda, k, x).unwrap() * x.powi(n as i32 - 1);
                    assert!(
                        (lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0),
                        "n={n} lambda={lambda} k={k} x={x}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn q_derivative_specialization() {
        for &q in &[0.3, 0.7, 1.5] {
            for n in 1..=8u32 {
                for &x in &[0.2, 0.9, 1.7] {
                    let lhs = derive(&dilation(q), &RealFunction::monomial(n), x);
                    let expected =
                        (q.powi(n as i32) - 1.0) / (q - 1.0) * x.powi(n as i32 - 1);
                    assert!(
                        (lhs - expected).abs() <= 1e-11 * expected.abs().max(1.0),
                        "q={q} n={n} x={x}"
                    );
                }
            }
        }
    }

    /// 60-term geometric brute force for the inverse of the constant one.
    fn geometric_oracle(q: f64, x: f64) -> f64 {
        (0..60).map(|j| (q.powi(j) - q.powi(j + 1)) * x).sum()
    }

    #[test]
    fn inverse_derivative_of_one_is_x() {
        let one = RealFunction::constant(1.0);
        let cfg = InverseConfig::default();
        let got = inverse_derivative(&dilation(0.5), &one, 1.0, &cfg).unwrap();
        assert!((got - geometric_oracle(0.5, 1.0)).abs() < 5e-12);
        assert!((got - 1.0).abs() < 1e-11);
    }

    #[test]
    fn inverse_round_trip_on_monomials() {
        let cfg = InverseConfig::default();
        let dcfg = DerivativeConfig::default();
        for n in 0..=6u32 {
            for &x in &[0.25, 0.5, 1.0] {
                let op = dilation(0.5);
                let anti = inverse_derivative_fn(op, RealFunction::monomial(n), cfg);
                let got = deformed_derivative(&op, &anti, x, &dcfg).unwrap();
                let expected = x.powi(n as i32);
                assert!(
                    (got - expected).abs() <= 1e-8 * (1.0 + expected.abs()),
                    "n={n} x={x}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn expanding_orbit_diverges() {
        let cfg = InverseConfig::default();
        let err = inverse_derivative(&dilation(2.0), &RealFunction::monomial(2), 1.0, &cfg)
            .unwrap_err();
        assert!(matches!(err, Error::SeriesDiverged { .. }));
    }

    #[test]
    fn classical_limit_is_linear_in_lambda() {
        let cube = RealFunction::monomial(3);
        let dcfg = DerivativeConfig::default();
        for k in 1..=3u32 {
            for &lambda0 in &[1e-4, 1e-5, 1e-6] {
                let err = |lambda: f64| {
                    let op = OmegaOperator::power_deformation(lambda, k).unwrap();
                    let d = deformed_derivative(&op, &cube, 1.0, &dcfg).unwrap();
                    (d - 3.0).abs()
                };
                let ratio = err(lambda0) / err(lambda0 / 2.0);
                assert!(
                    (1.5..=2.5).contains(&ratio),
                    "k={k} lambda={lambda0}: ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn bound_pair_matches_free_function() {
        let pair = DeformedDerivative::new(dilation(2.0), RealFunction::monomial(2));
        assert_eq!(pair.eval(3.0).unwrap(), 9.0);
        // second derivative through the function object: D(D x^3) on a
        // dilation gives [3]_q [2]_q x
        let q = 0.5;
        let dd = DeformedDerivative::new(
            dilation(q),
            DeformedDerivative::new(dilation(q), RealFunction::monomial(3)).into_fn(),
        );
        let expected = (1.0 + q + q * q) * (1.0 + q) * 2.0;
        assert!((dd.eval(2.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn eval_error_propagates() {
        let op = OmegaOperator::translation(-3.0).unwrap();
        let lnx = RealFunction::from_expr(parse("ln(x)").unwrap());
        // omega(1) = -2 is outside the log domain
        let err = deformed_derivative(&op, &lnx, 1.0, &DerivativeConfig::default());
        assert!(matches!(err, Err(Error::Eval(EvalError::LogNonPositive(_)))));
    }
}
