use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use super::monomial::{Monomial, Var};
use super::rational::{self, parse_rational, Rational};

/// Largest total degree a product or derivation may produce.
///
/// Repeated time derivatives raise the `E` degree by up to six per step, so
/// nineteen of them on `S` already reach degree 115.
pub const DEFAULT_DEGREE_CAP: u32 = 160;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("total degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("nu must be positive")]
    NonPositiveNu,
    #[error("cannot parse polynomial term `{0}`")]
    Parse(String),
}

/// Parameters of the time derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationParams {
    pub nu: Rational,
    pub degree_cap: u32,
}

impl DerivationParams {
    pub fn new(nu: Rational) -> Result<Self, PolyError> {
        if nu <= Rational::zero() {
            return Err(PolyError::NonPositiveNu);
        }
        Ok(Self { nu, degree_cap: DEFAULT_DEGREE_CAP })
    }
}

impl Default for DerivationParams {
    fn default() -> Self {
        Self { nu: Rational::one(), degree_cap: DEFAULT_DEGREE_CAP }
    }
}

/// Sparse polynomial with exact rational coefficients.
///
/// Terms are kept sorted by monomial with no zero coefficient, so structural
/// equality is polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::ONE, c)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(m, c)] }
        }
    }

    /// Integer-coefficient monomial `c · e^i s^j x1^k x2^l x3^m`.
    pub fn monomial(c: i64, exps: [u16; 5]) -> Self {
        Self::term(Monomial(exps), Rational::from_integer(c.into()))
    }

    /// Canonicalizes an arbitrary list of terms (merging duplicates).
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut raw: Vec<(Monomial, Rational)> = terms.into_iter().collect();
        raw.sort_by_key(|t| t.0);
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True iff every coefficient is zero (the canonical term list is empty).
    pub fn is_identically_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// Largest exponent of `v` over all terms.
    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        match self.terms.binary_search_by(|(k, _)| k.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &Rational| if negate_other { -c.clone() } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Less => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*mb, sign(cb)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate_other { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((*ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (*m, sign(c))));
        Poly { terms: out }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn scale_int(&self, c: i64) -> Poly {
        self.scale(&Rational::from_integer(c.into()))
    }

    /// Product, failing if a resulting term exceeds `cap` in total degree.
    pub fn mul_capped(&self, other: &Poly, cap: u32) -> Result<Poly, PolyError> {
        let degree = self.degree() + other.degree();
        if !self.is_empty() && !other.is_empty() && degree > cap {
            return Err(PolyError::DegreeCap { degree, cap });
        }
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                raw.push((ma.mul(mb), ca * cb));
            }
        }
        Ok(Poly::from_terms(raw))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.mul_capped(other, DEFAULT_DEGREE_CAP)
    }

    pub fn pow(&self, k: u32) -> Result<Poly, PolyError> {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Ordinary partial derivative with respect to any ring variable.
    pub fn derive_var(&self, v: Var) -> Poly {
        let slot = v.slot();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[slot] > 0)
            .map(|(m, c)| {
                let mut e = m.0;
                let k = e[slot];
                e[slot] -= 1;
                (Monomial(e), c * Rational::from_integer(k.into()))
            });
        // lowering one exponent keeps the order of the remaining terms
        Poly { terms: terms.collect() }
    }

    /// `∂/∂X_axis`; `E` and `S` are constant in space.
    pub fn derive_space(&self, v: Var) -> Poly {
        debug_assert!(matches!(v, Var::X1 | Var::X2 | Var::X3));
        self.derive_var(v)
    }

    /// Time derivation: `dE/dt = E²`, `dS/dt = -5ν S E⁶`, `dX/dt = 0`.
    pub fn derive_time(&self, params: &DerivationParams) -> Result<Poly, PolyError> {
        let five_nu = &params.nu * Rational::from_integer(5.into());
        let mut raw = Vec::with_capacity(2 * self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exp(Var::E);
            let s = m.exp(Var::S);
            if e > 0 {
                raw.push((m.with_exp(Var::E, e + 1), c * Rational::from_integer(e.into())));
            }
            if s > 0 {
                let k = Rational::from_integer(s.into());
                raw.push((m.with_exp(Var::E, e + 6), -(c * &five_nu * k)));
            }
        }
        let out = Poly::from_terms(raw);
        let degree = out.degree();
        if degree > params.degree_cap {
            return Err(PolyError::DegreeCap { degree, cap: params.degree_cap });
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rational; 5]) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    v *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += v;
        }
        total
    }

    /// Replaces variable `v` by the polynomial `q`.
    pub fn substitute(&self, v: Var, q: &Poly) -> Result<Poly, PolyError> {
        let mut acc = Poly::zero();
        let mut powers = vec![Poly::one()];
        for (m, c) in &self.terms {
            let k = m.exp(v) as usize;
            while powers.len() <= k {
                let next = powers.last().unwrap().mul(q)?;
                powers.push(next);
            }
            let rest = Poly::term(m.with_exp(v, 0), c.clone());
            acc = &acc + &rest.mul(&powers[k])?;
        }
        Ok(acc)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

/// Text form: `num/den e^i s^j x1^k x2^l x3^m` terms joined by ` ; `, in
/// canonical order; the zero polynomial is `0`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{} {}", rational::format_rational(c), m)?;
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut terms = Vec::new();
        for chunk in s.split(';') {
            let bad = || PolyError::Parse(chunk.trim().to_string());
            let mut fields = chunk.split_whitespace();
            let coeff = parse_rational(fields.next().ok_or_else(bad)?).map_err(|_| bad())?;
            let mut exps = [0u16; 5];
            for (slot, v) in Var::ALL.iter().enumerate() {
                let field = fields.next().ok_or_else(bad)?;
                let (name, exp) = field.split_once('^').ok_or_else(bad)?;
                if name != v.name() {
                    return Err(bad());
                }
                exps[slot] = exp.parse().map_err(|_| bad())?;
            }
            if fields.next().is_some() {
                return Err(bad());
            }
            terms.push((Monomial(exps), coeff));
        }
        Ok(Poly::from_terms(terms))
    }
}

/// Short human form, e.g. `-4 s x1^3 - 4 s x1 x2^2`.
pub struct Pretty<'a>(pub &'a Poly);

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.0.terms.iter().enumerate() {
            let neg = rational::is_negative(c);
            let abs = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = Var::ALL
                .iter()
                .filter(|&&v| m.exp(v) > 0)
                .map(|&v| match m.exp(v) {
                    1 => v.name().to_string(),
                    k => format!("{}^{}", v.name(), k),
                })
                .collect();
            if vars.is_empty() || !abs.is_one() {
                write!(f, "{}", rational::Display(&abs))?;
                if !vars.is_empty() {
                    write!(f, " ")?;
                }
            }
            write!(f, "{}", vars.join(" "))?;
        }
        Ok(())
    }
}
