//! Real 2x2 matrices acting as fractional-linear maps, the canonical
//! reduced/dilation/translation factors, and the cross-check between the
//! matrix action and the operator point maps.
//!
//! The factors
//!
//! ```text
//! R(lambda) = | 1       0 |    Q(q) = | sqrt(q)      0    |    H(h) = | 1  h |
//!             | lambda  1 |           |   0     1/sqrt(q) |           | 0  1 |
//! ```
//!
//! compose (apply `H` first) to the general unit-determinant map
//!
//! ```text
//! R Q H = | sqrt(q)          sqrt(q)*h              |
//!         | sqrt(q)*lambda   sqrt(q)*lambda*h + 1/sqrt(q) |
//! ```

use crate::error::{Error, Result};
use crate::operator::OmegaOperator;

/// A real 2x2 matrix with nonzero determinant, acting on the line by
/// `x -> (a*x + b) / (c*x + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMatrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MobiusMatrix {
    /// Builds a matrix, rejecting singular or non-finite entries.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidOperator("matrix entries must be finite".into()));
        }
        let m = Self { a, b, c, d };
        if m.det() == 0.0 {
            return Err(Error::SingularMatrix);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// The reduced factor `[[1, 0], [lambda, 1]]`, acting as
    /// `x -> x / (lambda*x + 1)` — the k = 1 power deformation.
    pub fn reduced(lambda: f64) -> Self {
        Self { a: 1.0, b: 0.0, c: lambda, d: 1.0 }
    }

    /// The dilation factor `[[sqrt(q), 0], [0, 1/sqrt(q)]]`; requires q > 0.
    pub fn dilation(q: f64) -> Result<Self> {
        if q <= 0.0 || !q.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "dilation factor needs q > 0 for a real sqrt, got {q}"
            )));
        }
        let s = q.sqrt();
        Ok(Self { a: s, b: 0.0, c: 0.0, d: 1.0 / s })
    }

    /// The translation factor `[[1, h], [0, 1]]`.
    pub fn translation(h: f64) -> Self {
        Self { a: 1.0, b: h, c: 0.0, d: 1.0 }
    }

    /// The composite `reduced(lambda) * dilation(q) * translation(h)`.
    pub fn composite(lambda: f64, q: f64, h: f64) -> Result<Self> {
        Ok(Self::reduced(lambda)
            .multiply(&Self::dilation(q)?)
            .multiply(&Self::translation(h)))
    }

    pub fn entries(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Fractional-linear action `(a*x + b) / (c*x + d)`.
    pub fn act(&self, x: f64) -> Result<f64> {
        let denominator = self.c * x + self.d;
        let scale = self.a.abs() + self.b.abs() + self.c.abs() + self.d.abs();
        if denominator.abs() <= 1e-300 * scale {
            return Err(Error::Pole { denominator });
        }
        Ok((self.a * x + self.b) / denominator)
    }

    /// Standard matrix product; the left factor acts last on the line.
    pub fn multiply(&self, other: &MobiusMatrix) -> MobiusMatrix {
        MobiusMatrix {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }
}

impl std::fmt::Display for MobiusMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `|matrix action - operator composition|` at `x`: the composite matrix
/// against applying translation, dilation and the k = 1 power deformation
/// in sequence. `q = 1` is applied as the identity scaling, since it is
/// not a constructible dilation operator.
pub fn factor_action_check(lambda: f64, q: f64, h: f64, x: f64) -> Result<f64> {
    let after_shift = OmegaOperator::translation(h)?.apply(x)?;
    let after_scale = if q == 1.0 {
        after_shift
    } else {
        OmegaOperator::dilation(q)?.apply(after_shift)?
    };
    let operator_route = OmegaOperator::power_deformation(lambda, 1)?.apply(after_scale)?;
    let matrix_route = MobiusMatrix::composite(lambda, q, h)?.act(x)?;
    Ok((matrix_route - operator_route).abs())
}
