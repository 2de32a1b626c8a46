//! Compact exact coefficients for the prolonged system.
//!
//! Every coefficient that arises from differentiating the pressure-free
//! system is a finite sum `Σ c·b_{s,j}(E, S)·x^k` where
//! `b_{s,j} = d^j(S^s)/dt^j` and `c` is rational. Storing the pair `(s, j)`
//! instead of the expanded `E`-polynomial of `b_{s,j}` keeps entries small:
//! `b_{1,19}` alone has 96 terms reaching `E^114`.
//!
//! The `b_{s,j}` are linearly independent over `ℚ[X]` (distinct `S` degree,
//! and for equal `s` the top `E` degree `6j` carries `(-5νs)^j ≠ 0`), so a
//! jet polynomial is identically zero iff its term list is empty.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive, Zero};

use crate::combinatorics::Axis;
use crate::pdesystem::{CoeffError, Coefficient};
use crate::polyring::{DerivationParams, Monomial, Point, Poly, Rational, Var};

/// `coef · b_{s,j} · x1^x[0] x2^x[1] x3^x[2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JetTerm {
    pub s: u8,
    pub j: u8,
    pub x: [u8; 3],
    pub coef: Rational64,
}

impl JetTerm {
    fn key(&self) -> (u8, u8, [u8; 3]) {
        (self.s, self.j, self.x)
    }

    /// True when the term depends on time only through `S`.
    pub fn is_time_free(&self) -> bool {
        self.j == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct JetPoly {
    terms: Vec<JetTerm>,
}

fn overflow<T>(_: T) -> CoeffError {
    CoeffError::Overflow
}

fn to_r64(r: &Rational) -> Option<Rational64> {
    Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

impl JetPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::from_terms(vec![JetTerm { s: 0, j: 0, x: [0; 3], coef: Rational64::from_integer(c) }])
            .expect("single term")
    }

    pub fn from_terms(mut terms: Vec<JetTerm>) -> Result<Self, CoeffError> {
        if terms.iter().any(|t| t.s == 0 && t.j != 0) {
            return Err(CoeffError::Unsupported("time derivative of a constant".into()));
        }
        terms.sort_by_key(JetTerm::key);
        let mut out: Vec<JetTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.key() == t.key() => {
                    last.coef = last.coef.checked_add(&t.coef).ok_or(CoeffError::Overflow)?;
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coef.is_zero());
        Ok(Self { terms: out })
    }

    /// Converts a time-free polynomial (no `E`) into jet form.
    pub fn from_poly(p: &Poly) -> Result<Self, CoeffError> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            if m.exp(Var::E) != 0 {
                return Err(CoeffError::Unsupported(format!("E already present in {p}")));
            }
            let small = |v: Var| u8::try_from(m.exp(v)).map_err(overflow);
            terms.push(JetTerm {
                s: small(Var::S)?,
                j: 0,
                x: [small(Var::X1)?, small(Var::X2)?, small(Var::X3)?],
                coef: to_r64(c).ok_or(CoeffError::Overflow)?,
            });
        }
        Self::from_terms(terms)
    }

    pub fn terms(&self) -> &[JetTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Time-derivative order shared by the `S`-bearing terms, if any.
    pub fn max_time_order(&self) -> u8 {
        self.terms.iter().map(|t| t.j).max().unwrap_or(0)
    }

    pub fn derive_time(&self) -> Result<Self, CoeffError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms.iter().filter(|t| t.s > 0) {
            let j = t.j.checked_add(1).ok_or(CoeffError::Overflow)?;
            terms.push(JetTerm { j, ..*t });
        }
        // (s, j) → (s, j+1) is monotone, so order is preserved
        Ok(Self { terms })
    }

    pub fn derive_space(&self, slot: usize) -> Result<Self, CoeffError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms.iter().filter(|t| t.x[slot] > 0) {
            let k = t.x[slot] as i64;
            let mut x = t.x;
            x[slot] -= 1;
            let coef = t.coef.checked_mul(&Rational64::from_integer(k)).ok_or(CoeffError::Overflow)?;
            terms.push(JetTerm { x, coef, ..*t });
        }
        Self::from_terms(terms)
    }

    /// Expands into an ordinary polynomial in `(E, S, X)`.
    pub fn to_poly(&self, table: &mut TimeJetTable) -> Result<Poly, CoeffError> {
        let mut acc = Poly::zero();
        for t in &self.terms {
            let b = table.poly(t.s, t.j)?;
            let x = Monomial([0, 0, t.x[0] as u16, t.x[1] as u16, t.x[2] as u16]);
            let c = Rational::new((*t.coef.numer()).into(), (*t.coef.denom()).into());
            acc = &acc + &b.mul(&Poly::term(x, c))?;
        }
        Ok(acc)
    }
}

impl Coefficient for JetPoly {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn try_add(&self, other: &Self) -> Result<Self, CoeffError> {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    fn try_neg(&self) -> Result<Self, CoeffError> {
        let mut terms = self.terms.clone();
        for t in &mut terms {
            t.coef = Rational64::zero()
                .checked_sub(&t.coef)
                .ok_or(CoeffError::Overflow)?;
        }
        Ok(Self { terms })
    }

    fn derive(&self, axis: Axis, _params: &DerivationParams) -> Result<Self, CoeffError> {
        match axis {
            Axis::T => self.derive_time(),
            a => self.derive_space(a.slot() - 1),
        }
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(
                f,
                "{}/{} b{},{} x1^{} x2^{} x3^{}",
                t.coef.numer(),
                t.coef.denom(),
                t.s,
                t.j,
                t.x[0],
                t.x[1],
                t.x[2]
            )?;
        }
        Ok(())
    }
}

impl FromStr for JetPoly {
    type Err = CoeffError;

    /// Inverse of `Display`: `num/den bS,J x1^a x2^b x3^c` joined by `;`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero());
        }
        let mut terms = Vec::new();
        for chunk in text.split(';') {
            let bad = || CoeffError::Unsupported(format!("bad jet term `{}`", chunk.trim()));
            let fields: Vec<&str> = chunk.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(bad());
            }
            let (num, den) = fields[0].split_once('/').ok_or_else(bad)?;
            let num: i64 = num.parse().map_err(|_| bad())?;
            let den: i64 = den.parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            let (s, j) = fields[1].strip_prefix('b').and_then(|b| b.split_once(',')).ok_or_else(bad)?;
            let mut x = [0u8; 3];
            for (slot, field) in fields[2..].iter().enumerate() {
                let prefix = ["x1^", "x2^", "x3^"][slot];
                x[slot] = field.strip_prefix(prefix).ok_or_else(bad)?.parse().map_err(|_| bad())?;
            }
            terms.push(JetTerm {
                s: s.parse().map_err(|_| bad())?,
                j: j.parse().map_err(|_| bad())?,
                x,
                coef: Rational64::new(num, den),
            });
        }
        Self::from_terms(terms)
    }
}

/// Cache of `b_{s,j} = d^j(S^s)/dt^j`, both symbolically and at a point.
#[derive(Debug, Clone)]
pub struct TimeJetTable {
    params: DerivationParams,
    polys: HashMap<(u8, u8), Poly>,
}

impl TimeJetTable {
    pub fn new(params: DerivationParams) -> Self {
        Self { params, polys: HashMap::new() }
    }

    pub fn params(&self) -> &DerivationParams {
        &self.params
    }

    pub fn poly(&mut self, s: u8, j: u8) -> Result<&Poly, CoeffError> {
        if !self.polys.contains_key(&(s, j)) {
            let p = if j == 0 {
                Poly::var(Var::S).pow(s as u32)?
            } else {
                let params = self.params.clone();
                self.poly(s, j - 1)?.derive_time(&params)?
            };
            self.polys.insert((s, j), p);
        }
        Ok(&self.polys[&(s, j)])
    }
}

/// Exact evaluation of jet polynomials at a fixed point.
#[derive(Debug, Clone)]
pub struct JetEvaluator {
    point: Point,
    time_values: HashMap<(u8, u8), Rational>,
    x_powers: [Vec<Rational>; 3],
    table: TimeJetTable,
}

impl JetEvaluator {
    pub fn new(point: Point, params: DerivationParams) -> Self {
        let one = Rational::from_integer(1.into());
        Self {
            point,
            time_values: HashMap::new(),
            x_powers: [vec![one.clone()], vec![one.clone()], vec![one]],
            table: TimeJetTable::new(params),
        }
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    fn time_value(&mut self, s: u8, j: u8) -> Result<Rational, CoeffError> {
        if let Some(v) = self.time_values.get(&(s, j)) {
            return Ok(v.clone());
        }
        let v = self.table.poly(s, j)?.evaluate(&self.point);
        self.time_values.insert((s, j), v.clone());
        Ok(v)
    }

    fn x_power(&mut self, slot: usize, k: u8) -> &Rational {
        let powers = &mut self.x_powers[slot];
        while powers.len() <= k as usize {
            let next = powers.last().unwrap() * &self.point[2 + slot];
            powers.push(next);
        }
        &powers[k as usize]
    }

    pub fn evaluate(&mut self, p: &JetPoly) -> Result<Rational, CoeffError> {
        let mut total = Rational::zero();
        for t in p.terms() {
            let b = self.time_value(t.s, t.j)?;
            if b.is_zero() {
                continue;
            }
            let mut v = b * Rational::new((*t.coef.numer()).into(), (*t.coef.denom()).into());
            for slot in 0..3 {
                if t.x[slot] > 0 {
                    v *= self.x_power(slot, t.x[slot]);
                }
            }
            total += v;
        }
        Ok(total)
    }
}
