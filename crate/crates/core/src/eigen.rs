//! Eigenfunctions of the deformed derivative with eigenvalue one, realized
//! as truncated infinite products over the operator orbit, plus the scaled
//! eigenvalue and invariance identities.
//!
//! The forward product runs over the orbit `x, omega(x), omega^2(x), ...`:
//!
//! ```text
//! E(x) = prod_j 1 / (1 + omega^(j+1)(x) - omega^j(x))
//! ```
//!
//! It converges where the orbit increments shrink; that region is detected
//! by a pre-flight scan, never assumed. For operators whose forward orbit
//! expands, the same functional equation `E(omega(x)) = (1 + omega(x) - x) E(x)`
//! can be iterated along the inverse orbit instead, giving the reindexed
//! product
//!
//! ```text
//! E(x) = prod_m (1 + omega^(1-m)(x) - omega^(-m)(x)),   m = 1, 2, ...
//! ```
//!
//! normalized at the backward fixed point. Both realizations are exposed;
//! [`EigenfunctionEvaluator::value`] picks whichever one contracts.

use crate::calculus::{deformed_derivative, DerivativeConfig, InverseConfig, RealFunction};
use crate::error::{Error, Result};
use crate::operator::OmegaOperator;

const POLE_EPS: f64 = 1e-13;
/// Ratio bound for the pre-flight scan; exactly constant increments
/// (translations) are admitted, growing ones are not.
const SCAN_RATIO: f64 = 1.0 + 1e-9;
const SCAN_STEPS: usize = 8;

/// Truncated-product evaluator for one operator.
#[derive(Debug, Clone, Copy)]
pub struct EigenfunctionEvaluator {
    op: OmegaOperator,
    /// Stop once the current factor differs from 1 by at most this.
    pub product_tol: f64,
    pub max_factors: usize,
}

/// A converged product evaluation. Truncation that never meets the
/// stopping criterion is reported as [`Error::NotConverged`], never as a
/// silently truncated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductEval {
    pub value: f64,
    pub factors: usize,
    /// `|factor - 1|` of the last factor taken.
    pub last_deviation: f64,
}

/// Truncated series evaluation with the magnitude of its last term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    pub last_term: f64,
    /// Number of orbit points the nested series were evaluated on.
    pub grid_len: usize,
}

/// Residuals of the invariant product `P(x) = E(x) * E_inv(-x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceCheck {
    /// `|P(omega(x)) - P(x)|`, the map-invariance residual.
    pub invariance: f64,
    /// `|D P(x)|`, the derivative-of-invariant residual.
    pub derivative_residual: f64,
}

impl EigenfunctionEvaluator {
    pub fn new(op: OmegaOperator) -> Self {
        Self {
            op,
            product_tol: 1e-14,
            max_factors: 10_000,
        }
    }

    pub fn with_tolerances(op: OmegaOperator, product_tol: f64, max_factors: usize) -> Self {
        assert!(product_tol > 0.0 && max_factors >= 1);
        Self {
            op,
            product_tol,
            max_factors,
        }
    }

    pub fn op(&self) -> &OmegaOperator {
        &self.op
    }

    /// Requires the orbit increments of `map` at `x` to be non-expanding
    /// over eight consecutive steps before any product is evaluated.
    fn scan_contraction(&self, map: &OmegaOperator, x: f64) -> Result<()> {
        let mut point = x;
        let mut prev_step = f64::NAN;
        for _ in 0..=SCAN_STEPS {
            let next = map.apply(point)?;
            let step = (next - point).abs();
            if step == 0.0 {
                return Ok(()); // reached a fixed point
            }
            if !prev_step.is_nan() && step > prev_step * SCAN_RATIO {
                return Err(Error::NotConverged { factors: 0 });
            }
            prev_step = step;
            point = next;
        }
        Ok(())
    }

    /// Forward product `prod 1/(1 + mu * (omega^(j+1)x - omega^j x))`.
    fn forward_product(&self, mu: f64, x: f64) -> Result<ProductEval> {
        if mu == 0.0 {
            return Ok(ProductEval {
                value: 1.0,
                factors: 0,
                last_deviation: 0.0,
            });
        }
        self.scan_contraction(&self.op, x)?;
        let mut value = 1.0;
        let mut point = x;
        for factors in 1..=self.max_factors {
            let next = self.op.apply(point)?;
            let denominator = 1.0 + mu * (next - point);
            if denominator.abs() <= POLE_EPS {
                return Err(Error::Pole { denominator });
            }
            value /= denominator;
            if !value.is_finite() {
                return Err(Error::NotConverged { factors });
            }
            let deviation = (1.0 / denominator - 1.0).abs();
            // converged either when factors stabilize at 1 or when the
            // partial products have collapsed below the tolerance (the
            // translation family contracts the value, not the orbit)
            if deviation <= self.product_tol || value.abs() <= self.product_tol {
                return Ok(ProductEval {
                    value,
                    factors,
                    last_deviation: deviation,
                });
            }
            point = next;
        }
        Err(Error::NotConverged {
            factors: self.max_factors,
        })
    }

    /// Evaluates the forward truncated product at `x`.
    pub fn product(&self, x: f64) -> Result<ProductEval> {
        self.forward_product(1.0, x)
    }

    /// Reindexed product along the inverse orbit, for operators whose
    /// forward orbit expands: `prod_m (1 + omega^(1-m)x - omega^(-m)x)`.
    pub fn product_reindexed(&self, x: f64) -> Result<ProductEval> {
        let inv = self.op.inverse();
        self.scan_contraction(&inv, x)?;
        let mut value = 1.0;
        let mut prev = x;
        for factors in 1..=self.max_factors {
            let current = inv.apply(prev)?;
            let factor = 1.0 + (prev - current);
            if factor.abs() <= POLE_EPS {
                return Err(Error::Pole { denominator: factor });
            }
            value *= factor;
            if !value.is_finite() {
                return Err(Error::NotConverged { factors });
            }
            let deviation = (factor - 1.0).abs();
            if deviation <= self.product_tol || value.abs() <= self.product_tol {
                return Ok(ProductEval {
                    value,
                    factors,
                    last_deviation: deviation,
                });
            }
            prev = current;
        }
        Err(Error::NotConverged {
            factors: self.max_factors,
        })
    }

    /// The eigenfunction value through whichever realization contracts:
    /// forward product first, reindexed product if the forward orbit
    /// does not contract.
    pub fn value(&self, x: f64) -> Result<ProductEval> {
        match self.product(x) {
            Ok(eval) => Ok(eval),
            Err(Error::NotConverged { .. }) => self.product_reindexed(x),
            Err(other) => Err(other),
        }
    }

    /// Product with the scaled recursion `1/(1 + mu * (omega(x) - x))` per
    /// factor; realizes the eigenfunction with eigenvalue `mu`.
    pub fn scaled_product(&self, mu: f64, x: f64) -> Result<ProductEval> {
        self.forward_product(mu, x)
    }

    /// Residual of the scaled eigenvalue identity
    /// `E_mu(omega(x)) = (1 + mu*(omega(x) - x)) * E_mu(x)`.
    pub fn scaled_residual(&self, mu: f64, x: f64) -> Result<f64> {
        let wx = self.op.apply(x)?;
        let left = self.scaled_product(mu, wx)?.value;
        let right = (1.0 + mu * (wx - x)) * self.scaled_product(mu, x)?.value;
        Ok((left - right).abs())
    }

    /// Residuals of the invariant product `P(x) = E(x) * E_inv(-x)`, where
    /// `E_inv` belongs to the parameter-negated (inverse) operator. `P` is
    /// invariant under the point map, so it differentiates to zero.
    pub fn invariant_product_check(&self, x: f64) -> Result<InvarianceCheck> {
        let partner = Self {
            op: self.op.inverse(),
            product_tol: self.product_tol,
            max_factors: self.max_factors,
        };
        let this = *self;
        let p = move |y: f64| -> Result<f64> {
            Ok(this.value(y)?.value * partner.value(-y)?.value)
        };
        let wx = self.op.apply(x)?;
        let invariance = (p(wx)? - p(x)?).abs();
        let p_fn = RealFunction::fallible(p);
        let derivative =
            deformed_derivative(&self.op, &p_fn, x, &DerivativeConfig::default())?;
        Ok(InvarianceCheck {
            invariance,
            derivative_residual: derivative.abs(),
        })
    }
}

/// Forward-product eigenfunction with default tolerances.
pub fn eigen_product(op: &OmegaOperator, x: f64) -> Result<ProductEval> {
    EigenfunctionEvaluator::new(*op).product(x)
}

/// Series representation `E = sum_j e_j` with `e_0 = 1` and
/// `e_(j+1) = D^-1 e_j`, summed through `j_max`.
///
/// Every `e_j` is a nested inverse-derivative series; all evaluations land
/// on the orbit of `x`, so the nest is computed on one orbit grid with
/// suffix sums. The grid extends until the orbit increment drops below
/// `cfg.tail_tol * (1 + |x|)`; orbits that fail to do so within
/// `cfg.max_terms` report [`Error::SeriesDiverged`].
pub fn eigen_series(
    op: &OmegaOperator,
    x: f64,
    cfg: &InverseConfig,
    j_max: usize,
) -> Result<SeriesEval> {
    assert!(j_max >= 1);
    let increment_tol = cfg.tail_tol * (1.0 + x.abs());
    let mut points = vec![x];
    let mut current = x;
    loop {
        let next = op.apply(current)?;
        points.push(next);
        let step = (current - next).abs();
        current = next;
        if step <= increment_tol {
            break;
        }
        if points.len() > cfg.max_terms {
            return Err(Error::SeriesDiverged {
                terms: cfg.max_terms,
                last_term: step,
            });
        }
    }
    let grid = points.len() - 1;
    let mut level = vec![1.0; grid];
    let mut value = 1.0;
    let mut last_term = 1.0;
    for _ in 1..=j_max {
        let mut next_level = vec![0.0; grid];
        let mut acc = 0.0;
        for i in (0..grid).rev() {
            acc += (points[i] - points[i + 1]) * level[i];
            next_level[i] = acc;
        }
        level = next_level;
        last_term = level[0];
        value += last_term;
        if !value.is_finite() {
            return Err(Error::SeriesDiverged {
                terms: grid,
                last_term,
            });
        }
    }
    Ok(SeriesEval {
        value,
        last_term: last_term.abs(),
        grid_len: grid,
    })
}

/// `|D E(x) - E(x)|` with `E` the forward truncated product.
pub fn eigen_residual(
    ev: &EigenfunctionEvaluator,
    x: f64,
    cfg: &DerivativeConfig,
) -> Result<f64> {
    let evaluator = *ev;
    let e_fn = RealFunction::fallible(move |y| evaluator.product(y).map(|p| p.value));
    let derivative = deformed_derivative(ev.op(), &e_fn, x, cfg)?;
    let at_x = ev.product(x)?.value;
    Ok((derivative - at_x).abs())
}

/// Residual of the scaled eigenvalue identity with default tolerances.
pub fn scaled_eigen_check(op: &OmegaOperator, mu: f64, x: f64) -> Result<f64> {
    EigenfunctionEvaluator::new(*op).scaled_residual(mu, x)
}

/// Invariant-product residuals with default tolerances.
pub fn invariant_product_check(op: &OmegaOperator, x: f64) -> Result<InvarianceCheck> {
    EigenfunctionEvaluator::new(*op).invariant_product_check(x)
}

/// Residuals for any function with `f(x) = f(omega(x))`: such a function
/// differentiates to zero even when it is not constant (for example an
/// h-periodic function under the translation by h).
pub fn function_invariance_check(
    op: &OmegaOperator,
    f: &RealFunction,
    x: f64,
    cfg: &DerivativeConfig,
) -> Result<(f64, f64)> {
    let wx = op.apply(x)?;
    let map_residual = (f.eval(wx)? - f.eval(x)?).abs();
    let derivative = deformed_derivative(op, f, x, cfg)?;
    Ok((map_residual, derivative.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dilation(q: f64) -> OmegaOperator {
        OmegaOperator::dilation(q).unwrap()
    }

    /// 60-factor brute-force oracle for the dilation product at small x.
    fn dilation_product_oracle(q: f64, x: f64) -> f64 {
        let mut value = 1.0;
        for j in 0..60 {
            value /= 1.0 + (q - 1.0) * q.powi(j) * x;
        }
        value
    }

    #[test]
    fn product_at_fixed_point_is_one() {
        for op in [dilation(0.5), OmegaOperator::power_deformation(0.5, 1).unwrap()] {
            let eval = eigen_product(&op, 0.0).unwrap();
            assert_eq!(eval.value, 1.0);
        }
    }

    #[test]
    fn product_matches_brute_force() {
        let eval = eigen_product(&dilation(0.5), 0.1).unwrap();
        let oracle = dilation_product_oracle(0.5, 0.1);
        assert!(
            (eval.value - oracle).abs() < 1e-12,
            "{} vs {}",
            eval.value,
            oracle
        );
    }

    #[test]
    fn product_pole_detected() {
        // first factor denominator 1 + (q-1)x vanishes at x = 2
        let err = eigen_product(&dilation(0.5), 2.0).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn expanding_orbit_not_converged() {
        let err = eigen_product(&dilation(2.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }));
        // but the unified route converges through the reindexed form
        let ev = EigenfunctionEvaluator::new(dilation(2.0));
        assert!(ev.value(0.1).is_ok());
    }

    #[test]
    fn series_examples() {
        // 1 + (D^-1 1)(x) = 1 + x at x = 1 for one series level
        let s = eigen_series(&dilation(0.5), 1.0, &InverseConfig::default(), 1).unwrap();
        assert!((s.value - 2.0).abs() < 1e-11, "{}", s.value);
        // fixed point: 1 + 0 + 0 + ...
        let s = eigen_series(&dilation(0.5), 0.0, &InverseConfig::default(), 5).unwrap();
        assert_eq!(s.value, 1.0);
        // the translation orbit never contracts
        let t = OmegaOperator::translation(0.5).unwrap();
        assert!(matches!(
            eigen_series(&t, 1.0, &InverseConfig::default(), 3),
            Err(Error::SeriesDiverged { .. })
        ));
    }

    #[test]
    fn series_agrees_with_product() {
        for &x in &[0.05, 0.1, 0.2] {
            let product = eigen_product(&dilation(0.5), x).unwrap().value;
            let series = eigen_series(&dilation(0.5), x, &InverseConfig::default(), 40)
                .unwrap()
                .value;
            assert!(
                (product - series).abs() <= 1e-6,
                "x={x}: {product} vs {series}"
            );
        }
    }

    #[test]
    fn residual_small_in_contracting_region() {
        let ev = EigenfunctionEvaluator::new(dilation(0.5));
        let r = eigen_residual(&ev, 0.1, &DerivativeConfig::default()).unwrap();
        assert!(r <= 1e-8, "residual {r}");

        let t = EigenfunctionEvaluator::new(OmegaOperator::translation(0.5).unwrap());
        let r = eigen_residual(&t, 0.0, &DerivativeConfig::default()).unwrap();
        assert!(r <= 1e-8, "translation residual {r}");
    }

    #[test]
    fn residual_via_singular_fallback_at_zero() {
        let ev = EigenfunctionEvaluator::new(dilation(0.5));
        let r = eigen_residual(&ev, 0.0, &DerivativeConfig::default()).unwrap();
        assert!(r <= 1e-6, "fallback residual {r}");
    }

    #[test]
    fn scaled_identity_examples() {
        // mu = 1 specialization
        let r = scaled_eigen_check(&dilation(0.5), 1.0, 0.1).unwrap();
        assert!(r <= 1e-8, "{r}");
        // mu = 0 makes both sides exactly one
        let r = scaled_eigen_check(&dilation(0.5), 0.0, 0.3).unwrap();
        assert_eq!(r, 0.0);
        // translation eigenvalue 1 + h
        let t = OmegaOperator::translation(0.5).unwrap();
        let r = scaled_eigen_check(&t, 1.0, 0.0).unwrap();
        assert!(r <= 1e-8, "{r}");
    }

    /// The translation family has the closed-form eigenfunction
    /// (1+h)^(x/h); the shift multiplies it by exactly 1 + h.
    #[test]
    fn translation_eigenvalue_closed_form() {
        let h = 0.5f64;
        let e = RealFunction::from_fn(move |x| (1.0 + h).powf(x / h));
        let op = OmegaOperator::translation(h).unwrap();
        for &x in &[-1.0, 0.0, 0.7] {
            let shifted = e.eval(op.apply(x).unwrap()).unwrap();
            let scaled = (1.0 + h) * e.eval(x).unwrap();
            assert!((shifted - scaled).abs() <= 1e-12 * scaled.abs());
            let d = deformed_derivative(&op, &e, x, &DerivativeConfig::default()).unwrap();
            assert!((d - e.eval(x).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn reciprocal_identity_matched_truncation() {
        let q = 0.5;
        for &x in &[0.05, 0.1] {
            let forward = EigenfunctionEvaluator::new(dilation(q)).product(x).unwrap();
            let reindexed = EigenfunctionEvaluator::new(dilation(1.0 / q))
                .product_reindexed(-x)
                .unwrap();
            assert!(
                (1.0 / forward.value - reindexed.value).abs() <= 1e-6,
                "x={x}: 1/{} vs {}",
                forward.value,
                reindexed.value
            );
        }
    }

    #[test]
    fn invariant_product_residuals() {
        for &x in &[0.0, 0.1, 0.2] {
            let check = invariant_product_check(&dilation(0.5), x).unwrap();
            assert!(check.invariance <= 1e-6, "x={x}: {}", check.invariance);
            assert!(
                check.derivative_residual <= 1e-6,
                "x={x}: {}",
                check.derivative_residual
            );
        }
    }

    #[test]
    fn periodic_function_differentiates_to_zero() {
        let h = 0.5f64;
        let op = OmegaOperator::translation(h).unwrap();
        let f = RealFunction::from_fn(move |x| (2.0 * std::f64::consts::PI * x / h).sin());
        for &x in &[-0.8, 0.0, 0.3, 1.1] {
            let (map_res, deriv_res) =
                function_invariance_check(&op, &f, x, &DerivativeConfig::default()).unwrap();
            assert!(map_res <= 1e-12, "x={x}: map {map_res}");
            assert!(deriv_res <= 1e-12, "x={x}: derivative {deriv_res}");
        }
    }
}
