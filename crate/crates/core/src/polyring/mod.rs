//! Exact polynomial arithmetic in `ℚ[E, S, X1, X2, X3]`.
//!
//! `S` stands for `ε·a(t)` and `E` for `1/(T - t)` where
//! `a(t) = exp(-ν/(T - t)^5)`; the only place time enters the ring is the
//! derivation [`Poly::derive_time`], which extends `d/dt` through
//! `dE/dt = E²` and `dS/dt = -5ν·S·E⁶`.

mod monomial;
mod poly;
mod rational;

pub use monomial::{Monomial, Var};
pub use poly::{DerivationParams, Poly, PolyError, Pretty, DEFAULT_DEGREE_CAP};
pub use rational::{format_rational, parse_rational, Rational, RationalParseError};

use crate::combinatorics::Axis;

/// A point `(e, s, x1, x2, x3)` at which polynomials are evaluated.
pub type Point = [Rational; 5];

/// The certification point: `e = 0`, `s = 1`, `x = (1.1, 1.2, 1.3)`.
pub fn certification_point() -> Point {
    [
        Rational::from_integer(0.into()),
        Rational::from_integer(1.into()),
        Rational::new(11.into(), 10.into()),
        Rational::new(12.into(), 10.into()),
        Rational::new(13.into(), 10.into()),
    ]
}

/// Parses `e,s,x1,x2,x3` with each component `num/den` or a decimal.
pub fn parse_point(text: &str) -> Result<Point, RationalParseError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(RationalParseError(format!(
            "expected 5 comma-separated components, got {}",
            parts.len()
        )));
    }
    let mut out = certification_point();
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_rational(part)?;
    }
    Ok(out)
}

/// The spatial variable matching a spatial axis; `None` for time.
pub fn space_var(axis: Axis) -> Option<Var> {
    match axis {
        Axis::T => None,
        Axis::X1 => Some(Var::X1),
        Axis::X2 => Some(Var::X2),
        Axis::X3 => Some(Var::X3),
    }
}
