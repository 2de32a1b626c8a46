use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::combinatorics::{Axis, MultiIndex};
use crate::polyring::{space_var, DerivationParams, Poly, PolyError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("coefficient arithmetic overflowed")]
    Overflow,
    #[error("coefficient not representable: {0}")]
    Unsupported(String),
}

/// Unknowns and right-hand-side symbols of the adjoint system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnknownId {
    Z1,
    Z2,
    Pi,
    Phi1,
    Phi2,
    Phi3,
    Phi4,
}

impl UnknownId {
    pub fn is_rhs(self) -> bool {
        matches!(self, UnknownId::Phi1 | UnknownId::Phi2 | UnknownId::Phi3 | UnknownId::Phi4)
    }

    pub fn name(self) -> &'static str {
        match self {
            UnknownId::Z1 => "z1",
            UnknownId::Z2 => "z2",
            UnknownId::Pi => "pi",
            UnknownId::Phi1 => "phi1",
            UnknownId::Phi2 => "phi2",
            UnknownId::Phi3 => "phi3",
            UnknownId::Phi4 => "phi4",
        }
    }
}

/// A derivative `∂^deriv unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub unknown: UnknownId,
    pub deriv: MultiIndex,
}

impl Term {
    pub fn new(unknown: UnknownId, deriv: MultiIndex) -> Self {
        Self { unknown, deriv }
    }

    pub fn of(unknown: UnknownId, axes: &[Axis]) -> Self {
        Self::new(unknown, MultiIndex::from_axes(axes))
    }

    pub fn bump(self, axis: Axis) -> Self {
        Self { deriv: self.deriv.bump(axis), ..self }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.deriv, self.unknown.name())
    }
}

/// Coefficient types that equations can carry through differentiation.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    fn try_add(&self, other: &Self) -> Result<Self, CoeffError>;
    fn try_neg(&self) -> Result<Self, CoeffError>;
    /// Total derivative along `axis` (time derivation for `Axis::T`).
    fn derive(&self, axis: Axis, params: &DerivationParams) -> Result<Self, CoeffError>;
}

impl Coefficient for Poly {
    fn is_zero(&self) -> bool {
        self.is_identically_zero()
    }

    fn try_add(&self, other: &Self) -> Result<Self, CoeffError> {
        Ok(self + other)
    }

    fn try_neg(&self) -> Result<Self, CoeffError> {
        Ok(-self)
    }

    fn derive(&self, axis: Axis, params: &DerivationParams) -> Result<Self, CoeffError> {
        match space_var(axis) {
            Some(v) => Ok(self.derive_space(v)),
            None => Ok(self.derive_time(params)?),
        }
    }
}

/// One linear PDE: `Σ lhs[term]·term = Σ rhs[term]·term`.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation<C> {
    pub lhs: BTreeMap<Term, C>,
    pub rhs: BTreeMap<Term, C>,
    pub level: u32,
}

fn accumulate<C: Coefficient>(map: &mut BTreeMap<Term, C>, term: Term, c: C) -> Result<(), CoeffError> {
    if c.is_zero() {
        return Ok(());
    }
    match map.get_mut(&term) {
        Some(existing) => {
            let sum = existing.try_add(&c)?;
            if sum.is_zero() {
                map.remove(&term);
            } else {
                *existing = sum;
            }
        }
        None => {
            map.insert(term, c);
        }
    }
    Ok(())
}

impl<C: Coefficient> Equation<C> {
    pub fn new(level: u32) -> Self {
        Self { lhs: BTreeMap::new(), rhs: BTreeMap::new(), level }
    }

    /// Adds `c·term` to the side the unknown belongs to.
    pub fn add_term(&mut self, term: Term, c: C) -> Result<(), CoeffError> {
        if term.unknown.is_rhs() {
            accumulate(&mut self.rhs, term, c)
        } else {
            accumulate(&mut self.lhs, term, c)
        }
    }

    pub fn coefficient(&self, term: &Term) -> Option<&C> {
        self.lhs.get(term).or_else(|| self.rhs.get(term))
    }

    /// Highest derivative order among left-hand-side terms.
    pub fn order(&self) -> u32 {
        self.lhs.keys().map(|t| t.deriv.degree()).max().unwrap_or(0)
    }

    /// Leibniz rule on every term: `∂(c·∂^δ u) = (∂c)·∂^δ u + c·∂^{δ+1} u`.
    pub fn derive(&self, axis: Axis, params: &DerivationParams) -> Result<Self, CoeffError> {
        let mut out = Equation::new(self.level + 1);
        for (side, target) in [(&self.lhs, false), (&self.rhs, true)] {
            for (term, c) in side {
                let dc = c.derive(axis, params)?;
                let map = if target { &mut out.rhs } else { &mut out.lhs };
                accumulate(map, *term, dc)?;
                accumulate(map, term.bump(axis), c.clone())?;
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CoeffError> {
        let mut out = self.clone();
        out.level = self.level.max(other.level);
        for (term, c) in other.lhs.iter().chain(&other.rhs) {
            out.add_term(*term, c.try_neg()?)?;
        }
        Ok(out)
    }

    pub fn map_coefficients<D, F>(&self, mut f: F) -> Result<Equation<D>, CoeffError>
    where
        D: Coefficient,
        F: FnMut(&C) -> Result<D, CoeffError>,
    {
        let mut out = Equation::new(self.level);
        for (term, c) in self.lhs.iter().chain(&self.rhs) {
            out.add_term(*term, f(c)?)?;
        }
        Ok(out)
    }
}

impl Equation<Poly> {
    /// Substitutes polynomial test functions for the unknowns and returns
    /// `lhs - rhs` as a polynomial. `fields` maps an unknown to a polynomial
    /// in `(E, S, X)`; time enters through `params`.
    pub fn residual<F>(&self, fields: F, params: &DerivationParams) -> Result<Poly, CoeffError>
    where
        F: Fn(UnknownId) -> Poly,
    {
        let mut total = Poly::zero();
        for (side, sign) in [(&self.lhs, 1i64), (&self.rhs, -1)] {
            for (term, c) in side {
                let mut u = fields(term.unknown);
                for axis in Axis::ALL {
                    for _ in 0..term.deriv.get(axis) {
                        u = Coefficient::derive(&u, axis, params)?;
                    }
                }
                total = &total + &c.mul(&u)?.scale(&Rational::from_integer(sign.into()));
            }
        }
        Ok(total)
    }
}
