//! The multiplicative operator family.
//!
//! Each operator is a closed-form point map `x -> omega(x)` together with an
//! exact inverse map. A multiplicative operator is fully determined by its
//! point map, so composition, orbits and the derived calculus all reduce to
//! iterating these maps.
//!
//! The four kinds:
//!
//! * `Translation(h)`: `x + h`, the shift behind the finite-difference derivative
//! * `Dilation(q)`: `q*x`, the scaling behind the q-derivative
//! * `PowerDeformation(lambda, k)`: `x / (1 + lambda*k*x^k)^(1/k)`
//! * `TwoParameter(lambda, mu)`: `x + ln(1 + lambda*mu*e^(-mu*x)) / mu`

use crate::error::{Error, Result};

/// Real principal k-th root of a positive base.
pub(crate) fn kth_root(base: f64, k: u32) -> f64 {
    debug_assert!(base > 0.0);
    match k {
        1 => base,
        2 => base.sqrt(),
        _ => base.powf(1.0 / f64::from(k)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Translation { h: f64 },
    Dilation { q: f64 },
    PowerDeformation { lambda: f64, k: u32 },
    TwoParameter { lambda: f64, mu: f64 },
}

/// A multiplicative linear operator, represented by its point map.
///
/// Invariants are enforced at construction: dilation needs `q > 0` and
/// `q != 1` (q = 1 makes every deformed-derivative denominator vanish),
/// power deformation needs `k >= 1`, and the two-parameter kind needs
/// `mu != 0` (the `mu -> 0` limit is [`two_parameter_mu_limit`], not a
/// stored operator). The identity is representable as `Translation(0)`,
/// `PowerDeformation(0, k)` or `TwoParameter(0, mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaOperator {
    kind: Kind,
}

/// Result of iterating a point map; `complete` is false when a step left
/// the operator's domain before `j_max` applications.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// `[x, omega(x), omega^2(x), ...]`; always starts with the seed point.
    pub points: Vec<f64>,
    pub complete: bool,
}

/// Closed-form composite of two same-family operators.
///
/// Parameters may compose to a value that no operator accepts (dilations
/// multiplying to q = 1), so the raw parameter is returned and the caller
/// decides via [`ComposedOperator::into_operator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComposedOperator {
    Translation { h: f64 },
    Dilation { q: f64 },
    PowerDeformation { lambda: f64, k: u32 },
}

impl ComposedOperator {
    pub fn into_operator(self) -> Result<OmegaOperator> {
        match self {
            ComposedOperator::Translation { h } => OmegaOperator::translation(h),
            ComposedOperator::Dilation { q } => OmegaOperator::dilation(q),
            ComposedOperator::PowerDeformation { lambda, k } => {
                OmegaOperator::power_deformation(lambda, k)
            }
        }
    }
}

impl OmegaOperator {
    /// Shift operator `x -> x + h`.
    pub fn translation(h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InvalidOperator(format!("translation h = {h}")));
        }
        Ok(Self { kind: Kind::Translation { h } })
    }

    /// Scaling operator `x -> q*x`; requires `q > 0` and `q != 1`.
    pub fn dilation(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(Error::InvalidOperator(format!("dilation q = {q} must be positive")));
        }
        if q == 1.0 {
            return Err(Error::InvalidOperator(
                "dilation q = 1 is the identity; the derivative denominator vanishes".into(),
            ));
        }
        Ok(Self { kind: Kind::Dilation { q } })
    }

    /// `x -> x / (1 + lambda*k*x^k)^(1/k)`; requires `k >= 1`.
    pub fn power_deformation(lambda: f64, k: u32) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidOperator(format!("power deformation lambda = {lambda}")));
        }
        if k == 0 {
            return Err(Error::InvalidOperator("power deformation needs k >= 1".into()));
        }
        Ok(Self { kind: Kind::PowerDeformation { lambda, k } })
    }

    /// `x -> x + ln(1 + lambda*mu*e^(-mu*x)) / mu`; requires `mu != 0`.
    pub fn two_parameter(lambda: f64, mu: f64) -> Result<Self> {
        if !lambda.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidOperator(format!("two-parameter ({lambda}, {mu})")));
        }
        if mu == 0.0 {
            return Err(Error::InvalidOperator(
                "two-parameter mu = 0; use two_parameter_mu_limit for the analytic limit".into(),
            ));
        }
        Ok(Self { kind: Kind::TwoParameter { lambda, mu } })
    }

    /// True when the point map is real-valued at `x`.
    pub fn in_domain(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.kind {
            Kind::Translation { .. } | Kind::Dilation { .. } => true,
            Kind::PowerDeformation { lambda, k } => {
                1.0 + lambda * f64::from(k) * x.powi(k as i32) > 0.0
            }
            Kind::TwoParameter { lambda, mu } => {
                if lambda == 0.0 {
                    return true;
                }
                let z = lambda * mu * (-mu * x).exp();
                // overflow of exp keeps the sign of lambda*mu
                z > -1.0 || (z == f64::INFINITY)
            }
        }
    }

    /// Evaluates the point map `omega(x)`.
    pub fn apply(&self, x: f64) -> Result<f64> {
        match self.kind {
            Kind::Translation { h } => Ok(x + h),
            Kind::Dilation { q } => Ok(q * x),
            Kind::PowerDeformation { lambda, k } => power_map(lambda, k, x),
            Kind::TwoParameter { lambda, mu } => two_parameter_map(lambda, mu, x),
        }
    }

    /// Evaluates the exact inverse map, i.e. the map of the parameter-negated
    /// operator: `inverse_apply(apply(x)) = x`.
    pub fn inverse_apply(&self, y: f64) -> Result<f64> {
        match self.kind {
            Kind::Translation { h } => Ok(y - h),
            Kind::Dilation { q } => Ok(y / q),
            Kind::PowerDeformation { lambda, k } => power_map(-lambda, k, y),
            Kind::TwoParameter { lambda, mu } => two_parameter_map(-lambda, mu, y),
        }
    }

    /// The inverse operator (negated parameter within the same family).
    pub fn inverse(&self) -> OmegaOperator {
        let kind = match self.kind {
            Kind::Translation { h } => Kind::Translation { h: -h },
            Kind::Dilation { q } => Kind::Dilation { q: 1.0 / q },
            Kind::PowerDeformation { lambda, k } => Kind::PowerDeformation { lambda: -lambda, k },
            Kind::TwoParameter { lambda, mu } => Kind::TwoParameter { lambda: -lambda, mu },
        };
        OmegaOperator { kind }
    }

    /// Closed-form composite `self . other` (apply `other` first).
    ///
    /// Parameters add (translation shifts, power-deformation lambdas with
    /// equal k) or multiply (dilation factors). No closed form exists across
    /// families or for the two-parameter kind.
    pub fn compose_same_family(&self, other: &OmegaOperator) -> Result<ComposedOperator> {
        match (self.kind, other.kind) {
            (Kind::Translation { h: a }, Kind::Translation { h: b }) => {
                Ok(ComposedOperator::Translation { h: a + b })
            }
            (Kind::Dilation { q: a }, Kind::Dilation { q: b }) => {
                Ok(ComposedOperator::Dilation { q: a * b })
            }
            (Kind::PowerDeformation { lambda: a, k: ka }, Kind::PowerDeformation { lambda: b, k: kb }) => {
                if ka != kb {
                    return Err(Error::IncompatibleOperators(format!(
                        "power deformations with k = {ka} and k = {kb}"
                    )));
                }
                Ok(ComposedOperator::PowerDeformation { lambda: a + b, k: ka })
            }
            _ => Err(Error::IncompatibleOperators(
                "no closed-form composition across families".into(),
            )),
        }
    }

    /// Iterates the point map: `[x, omega(x), ..., omega^j_max(x)]`.
    ///
    /// Stops early (with `complete = false`) if a step leaves the domain;
    /// partial orbits are needed near domain boundaries.
    pub fn orbit(&self, x: f64, j_max: usize) -> Orbit {
        let mut points = Vec::with_capacity(j_max + 1);
        points.push(x);
        let mut current = x;
        for _ in 0..j_max {
            match self.apply(current) {
                Ok(next) => {
                    points.push(next);
                    current = next;
                }
                Err(_) => return Orbit { points, complete: false },
            }
        }
        Orbit { points, complete: true }
    }
}

impl std::fmt::Display for OmegaOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            Kind::Translation { h } => write!(f, "translation:h={h}"),
            Kind::Dilation { q } => write!(f, "dilation:q={q}"),
            Kind::PowerDeformation { lambda, k } => write!(f, "power:lambda={lambda},k={k}"),
            Kind::TwoParameter { lambda, mu } => write!(f, "twoparam:lambda={lambda},mu={mu}"),
        }
    }
}

/// Analytic `mu -> 0` limit of the two-parameter map: exactly `x + lambda`.
pub fn two_parameter_mu_limit(lambda: f64, x: f64) -> f64 {
    x + lambda
}

fn power_map(lambda: f64, k: u32, x: f64) -> Result<f64> {
    let base = 1.0 + lambda * f64::from(k) * x.powi(k as i32);
    if base <= 0.0 || base.is_nan() {
        return Err(Error::Domain {
            x,
            reason: "1 + lambda*k*x^k must be positive for a real principal root",
        });
    }
    Ok(x / kth_root(base, k))
}

fn two_parameter_map(lambda: f64, mu: f64, x: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(x); // identity; avoids 0 * inf when exp overflows
    }
    let z = lambda * mu * (-mu * x).exp();
    if z == f64::INFINITY {
        // exp overflowed with lambda*mu > 0; switch to ln(e^(mu*x) + lambda*mu)/mu
        let lm = lambda * mu;
        return Ok((lm.ln() + ((mu * x).exp() / lm).ln_1p()) / mu);
    }
    if z <= -1.0 || z.is_nan() {
        return Err(Error::Domain {
            x,
            reason: "1 + lambda*mu*e^(-mu*x) must be positive for a real logarithm",
        });
    }
    Ok(x + z.ln_1p() / mu)
}
