//! Literal transcription of the printed explicit pressure-free system and a
//! term-by-term comparison against the generated one.

use std::collections::BTreeSet;

use crate::combinatorics::Axis::{self, T, X1, X2, X3};
use crate::polyring::Poly;

use super::equation::{Equation, Term, UnknownId};

/// `S · Σ c·x1^a x2^b x3^c`.
fn s_poly(terms: &[(i64, [u16; 3])]) -> Poly {
    terms
        .iter()
        .fold(Poly::zero(), |acc, &(c, [a, b, d])| &acc + &Poly::monomial(c, [0, 1, a, b, d]))
}

fn x_poly(terms: &[(i64, [u16; 3])]) -> Poly {
    terms
        .iter()
        .fold(Poly::zero(), |acc, &(c, [a, b, d])| &acc + &Poly::monomial(c, [0, 0, a, b, d]))
}

fn entry(u: UnknownId, axes: &[Axis], c: Poly) -> (Term, Poly) {
    (Term::of(u, axes), c)
}

/// The three printed equations, transcribed as they appear, including the
/// misprints listed in [`documented_typos`].
pub fn literal_syst1() -> [Vec<(Term, Poly)>; 3] {
    use UnknownId::*;
    let m1 = || Poly::from_int(-1);
    let p1 = || Poly::one();
    let first = vec![
        entry(Z1, &[X1], s_poly(&[(-4, [3, 0, 0]), (-4, [1, 2, 0])])),
        entry(Z1, &[X2], s_poly(&[(-2, [2, 1, 0]), (-2, [0, 3, 0])])),
        entry(Z1, &[X3], s_poly(&[(14, [2, 0, 1]), (10, [0, 2, 1])])),
        entry(Z2, &[X1], s_poly(&[(-2, [2, 1, 0]), (-2, [0, 3, 0])])),
        entry(Z2, &[X3], s_poly(&[(4, [1, 1, 1])])),
        entry(Z1, &[X1, X3], s_poly(&[(-2, [3, 0, 1]), (-2, [1, 2, 1])])),
        entry(Z1, &[X2, X3], s_poly(&[(-2, [2, 1, 1]), (-2, [0, 3, 1])])),
        entry(Z1, &[X3, X3], s_poly(&[(4, [2, 0, 2]), (4, [0, 2, 2])])),
        entry(Z1, &[X3, T], m1()),
        // printed as ∂³_{x1 x3 x3}
        entry(Z1, &[X1, X3, X3], m1()),
        entry(Z1, &[X2, X2, X3], m1()),
        // printed with a stray subscript `z^1_{333}`
        entry(Z1, &[X3, X3, X3], m1()),
        entry(Phi1, &[X3], p1()),
        entry(Phi3, &[X1], m1()),
    ];
    let second = vec![
        entry(Z1, &[X2], s_poly(&[(-2, [3, 0, 0]), (-2, [1, 2, 0])])),
        entry(Z1, &[X3], s_poly(&[(4, [1, 1, 1])])),
        entry(Z2, &[X1], s_poly(&[(-2, [3, 0, 0]), (-2, [1, 2, 0])])),
        entry(Z2, &[X2], s_poly(&[(-4, [2, 1, 0]), (-4, [0, 3, 0])])),
        entry(Z2, &[X3], s_poly(&[(10, [2, 0, 1]), (14, [0, 2, 1])])),
        entry(Z2, &[X1, X3], s_poly(&[(-2, [3, 0, 1]), (-2, [1, 2, 1])])),
        entry(Z2, &[X2, X3], s_poly(&[(-2, [2, 1, 1]), (-2, [0, 3, 1])])),
        // printed without the ε (hence without S)
        entry(Z2, &[X3, X3], x_poly(&[(4, [2, 0, 2]), (4, [0, 2, 2])])),
        entry(Z2, &[X3, T], m1()),
        entry(Z2, &[X1, X1, X3], m1()),
        entry(Z2, &[X2, X2, X3], m1()),
        entry(Z2, &[X3, X3, X3], m1()),
        entry(Phi2, &[X3], p1()),
        entry(Phi3, &[X2], m1()),
    ];
    let third = vec![entry(Z1, &[X1], m1()), entry(Z2, &[X2], m1()), entry(Phi4, &[], p1())];
    [first, second, third]
}

/// A known misprint: at `(equation, term)` the printed coefficient is
/// `literal` while the derivation gives `generated`.
#[derive(Debug, Clone)]
pub struct Typo {
    pub id: &'static str,
    pub description: &'static str,
    pub equation: usize,
    pub term: Term,
    pub literal: Poly,
    pub generated: Poly,
}

/// Printed misprints that the comparison is expected to hit.
pub fn documented_typos() -> Vec<Typo> {
    use UnknownId::*;
    vec![
        Typo {
            id: "d133-for-d113",
            description: "first equation prints -∂³_{x1x3x3} z1 where Δ∂3 gives -∂³_{x1x1x3} z1 (printed term)",
            equation: 1,
            term: Term::of(Z1, &[X1, X3, X3]),
            literal: Poly::from_int(-1),
            generated: Poly::zero(),
        },
        Typo {
            id: "d133-for-d113",
            description: "first equation prints -∂³_{x1x3x3} z1 where Δ∂3 gives -∂³_{x1x1x3} z1 (missing term)",
            equation: 1,
            term: Term::of(Z1, &[X1, X1, X3]),
            literal: Poly::zero(),
            generated: Poly::from_int(-1),
        },
        Typo {
            id: "missing-epsilon",
            description: "second equation drops ε a(t) on the ∂²_{x3x3} z2 coefficient",
            equation: 2,
            term: Term::of(Z2, &[X3, X3]),
            literal: x_poly(&[(4, [2, 0, 2]), (4, [0, 2, 2])]),
            generated: s_poly(&[(4, [2, 0, 2]), (4, [0, 2, 2])]),
        },
    ]
}

/// A coefficient where generated and printed systems differ.
#[derive(Debug, Clone)]
pub struct Deviation {
    pub equation: usize,
    pub term: Term,
    pub generated: Poly,
    pub literal: Poly,
    /// Identifier of the documented misprint explaining it, if any.
    pub typo: Option<&'static str>,
}

#[derive(Debug, Clone, Default)]
pub struct Syst1Report {
    pub matched: usize,
    pub deviations: Vec<Deviation>,
    /// Documented misprints that were not observed.
    pub unobserved_typos: Vec<&'static str>,
}

impl Syst1Report {
    pub fn undocumented(&self) -> impl Iterator<Item = &Deviation> {
        self.deviations.iter().filter(|d| d.typo.is_none())
    }

    /// Every difference is a documented misprint and every misprint shows up.
    pub fn passes(&self) -> bool {
        self.undocumented().next().is_none() && self.unobserved_typos.is_empty()
    }
}

/// Compares every coefficient of the generated system with the printed one.
pub fn crosscheck_syst1(eliminated: &[Equation<Poly>; 3]) -> Syst1Report {
    let literal = literal_syst1();
    let typos = documented_typos();
    let mut report = Syst1Report::default();
    let mut seen = BTreeSet::new();
    for (i, (eq, lit)) in eliminated.iter().zip(&literal).enumerate() {
        let equation = i + 1;
        let mut terms: BTreeSet<Term> = eq.lhs.keys().chain(eq.rhs.keys()).copied().collect();
        terms.extend(lit.iter().map(|(t, _)| *t));
        for term in terms {
            let generated = eq.coefficient(&term).cloned().unwrap_or_else(Poly::zero);
            let printed = lit
                .iter()
                .find(|(t, _)| *t == term)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Poly::zero);
            if generated == printed {
                report.matched += 1;
                continue;
            }
            let typo = typos
                .iter()
                .find(|t| t.equation == equation && t.term == term && t.literal == printed && t.generated == generated)
                .map(|t| t.id);
            if let Some(id) = typo {
                seen.insert((id, equation, term));
            }
            report.deviations.push(Deviation { equation, term, generated, literal: printed, typo });
        }
    }
    report.unobserved_typos = typos
        .iter()
        .filter(|t| !seen.contains(&(t.id, t.equation, t.term)))
        .map(|t| t.id)
        .collect();
    report
}

/// The printed system with each documented misprint replaced by the derived
/// coefficient.
pub fn corrected_literal_syst1() -> [Vec<(Term, Poly)>; 3] {
    let mut out = literal_syst1();
    for typo in documented_typos() {
        let eq = &mut out[typo.equation - 1];
        eq.retain(|(t, _)| *t != typo.term);
        if !typo.generated.is_identically_zero() {
            eq.push((typo.term, typo.generated.clone()));
        }
    }
    out
}
