use std::collections::HashMap;

use proptest::prelude::*;

use super::*;
use crate::combinatorics::{count_g, count_h, multiindex_of, Axis::*};
use crate::pdesystem::{build_eliminated_system, Coefficient, Term};
use crate::polyring::{certification_point, Monomial, Rational};

fn params() -> DerivationParams {
    DerivationParams::default()
}

fn jet_system() -> [Equation<JetPoly>; 3] {
    to_jet_system(&build_eliminated_system(&params()).unwrap()).unwrap()
}

#[test]
fn layout_fixes_first_six_columns() {
    let layout = ColumnLayout::new(22);
    assert_eq!(layout.ncols(), 29900);
    let expected = [
        Term::of(UnknownId::Z1, &[X1]),
        Term::of(UnknownId::Z1, &[X2]),
        Term::of(UnknownId::Z1, &[X3]),
        Term::of(UnknownId::Z2, &[X1]),
        Term::of(UnknownId::Z2, &[X2]),
        Term::of(UnknownId::Z2, &[X3]),
    ];
    for (j, t) in expected.iter().enumerate() {
        assert_eq!(layout.col(j).term(), *t);
    }
    assert_eq!(layout.col(6), ColId { unknown: UnknownId::Z1, deriv: MultiIndex::ZERO });
    assert_eq!(layout.col(7).deriv, multiindex_of(4));
    assert_eq!(layout.col(6 + 14950 - 3), ColId { unknown: UnknownId::Z2, deriv: MultiIndex::ZERO });
    for j in 0..layout.ncols() {
        assert_eq!(layout.index(&layout.col(j)), Some(j));
    }
    let too_deep = ColId { unknown: UnknownId::Z1, deriv: MultiIndex::new(23, 0, 0, 0) };
    assert_eq!(layout.index(&too_deep), None);
    assert_eq!(layout.index(&ColId { unknown: UnknownId::Phi1, deriv: MultiIndex::ZERO }), None);
}

#[test]
fn derive_eq3_is_an_index_bump() {
    let sys = jet_system();
    let d = derive_equation(&sys[2], X1, &params()).unwrap();
    assert_eq!(d.level, 1);
    assert_eq!(d.lhs.len(), 2);
    assert_eq!(d.coefficient(&Term::of(UnknownId::Z1, &[X1, X1])), Some(&JetPoly::constant(-1)));
    assert_eq!(d.coefficient(&Term::of(UnknownId::Z2, &[X1, X2])), Some(&JetPoly::constant(-1)));
    assert_eq!(d.coefficient(&Term::of(UnknownId::Phi4, &[X1])), Some(&JetPoly::constant(1)));
}

#[test]
fn product_rule_on_a_single_term() {
    let c = JetPoly::from_poly(&Poly::monomial(3, [0, 1, 2, 1, 0])).unwrap();
    let mut eq = Equation::new(0);
    eq.add_term(Term::of(UnknownId::Z1, &[X1]), c.clone()).unwrap();
    let d = derive_equation(&eq, X1, &params()).unwrap();
    let dc = JetPoly::from_poly(&Poly::monomial(6, [0, 1, 1, 1, 0])).unwrap();
    assert_eq!(d.coefficient(&Term::of(UnknownId::Z1, &[X1])), Some(&dc));
    assert_eq!(d.coefficient(&Term::of(UnknownId::Z1, &[X1, X1])), Some(&c));
}

#[test]
fn mixed_partials_commute() {
    let sys = jet_system();
    let p = params();
    for eq in &sys {
        for a in Axis::ALL {
            for b in Axis::ALL {
                let ab = derive_equation(&derive_equation(eq, a, &p).unwrap(), b, &p).unwrap();
                let ba = derive_equation(&derive_equation(eq, b, &p).unwrap(), a, &p).unwrap();
                assert_eq!(ab, ba);
            }
        }
    }
}

#[test]
fn level_zero_build() {
    let m = prolong(&jet_system(), 0, &params()).unwrap();
    assert_eq!((m.nrows(), m.ncols()), (17, 70));
    assert_eq!(m.rows_of_equation(1).len(), 1);
    assert_eq!(m.rows_of_equation(3).len(), 15);
    // eq1 and eq2 carry 12 z-terms each, each eq3 row two.
    assert_eq!(m.row(0).count(), 12);
    assert_eq!(m.row(1).count(), 12);
    assert_eq!(m.nnz(), 12 + 12 + 15 * 2);
    // The first-order columns come first.
    let eq3: Vec<usize> = m.row(2).map(|(j, _)| j).collect();
    assert_eq!(eq3, vec![0, 4]);
}

#[test]
fn dimensions_match_counting_functions() {
    let sys = jet_system();
    for n in 0..=6u32 {
        let m = prolong(&sys, n, &params()).unwrap();
        assert_eq!(m.nrows() as u64, count_g(n.into()).unwrap(), "rows at n={n}");
        assert_eq!(m.ncols() as u64, count_h(n.into()).unwrap(), "cols at n={n}");
        let ids = m.row_ids();
        assert!(ids.windows(2).all(|w| (w[0].base_eq, index_of(&w[0].applied)) < (w[1].base_eq, index_of(&w[1].applied))));
        for r in ids {
            assert!(r.applied.degree() <= level_of(r.base_eq, n));
        }
    }
}

#[test]
fn parent_decrements_smallest_axis() {
    assert_eq!(parent_of(&MultiIndex::new(1, 2, 0, 0)), Some((MultiIndex::new(0, 2, 0, 0), T)));
    assert_eq!(parent_of(&MultiIndex::new(0, 0, 2, 1)), Some((MultiIndex::new(0, 0, 1, 1), X2)));
    assert_eq!(parent_of(&MultiIndex::ZERO), None);
}

#[test]
fn blocks_partition_the_matrix() {
    let m = prolong(&jet_system(), 2, &params()).unwrap();
    let blocks = submatrix_blocks(&m).unwrap();
    let f = |k: u64| count_f(k).unwrap() as usize;
    assert_eq!((blocks.a[0].nrows(), blocks.a[0].ncols()), (f(2), f(5)));
    assert_eq!((blocks.b[2].nrows(), blocks.b[2].ncols()), (f(4), f(5)));
    let nnz: usize = blocks.a.iter().chain(&blocks.b).map(PolyMatrix::nnz).sum();
    assert_eq!(nnz, m.nnz());
    // Reassemble entry by entry.
    let mut row_offset = 0;
    for e in 0..3 {
        for (blk, unknown) in [(&blocks.a[e], UnknownId::Z1), (&blocks.b[e], UnknownId::Z2)] {
            for (i, j, v) in blk.entries() {
                let col = m.col_index(&blk.col_ids()[j]).unwrap();
                assert_eq!(m.col_ids()[col].unknown, unknown);
                assert_eq!(m.get(row_offset + i, col), Some(v));
            }
        }
        row_offset += blocks.a[e].nrows();
    }
}

#[test]
fn polymtx_round_trip() {
    let m = prolong(&jet_system(), 1, &params()).unwrap();
    let text = polymtx::to_polymtx_string(&m);
    assert!(text.starts_with(&format!("{} {} {}\n", m.nrows(), m.ncols(), m.nnz())));
    let back = polymtx::read_polymtx(text.as_bytes()).unwrap();
    assert_eq!(back, m);
    assert!(polymtx::read_polymtx("2 2 1\n1 3 1/1 b0,0 x1^0 x2^0 x3^0\n".as_bytes()).is_err());
}

#[test]
fn build_is_schedule_independent() {
    let sys = jet_system();
    let build = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| polymtx::to_polymtx_string(&prolong(&sys, 4, &params()).unwrap()))
    };
    let one = build(1);
    assert_eq!(one, build(4));
    assert_eq!(one, build(7));
}

#[test]
fn evaluated_entries_are_a_subset() {
    let m = prolong(&jet_system(), 3, &params()).unwrap();
    let ev = JetEvaluator::new(certification_point(), params());
    let nnz0 = evaluated_nnz(&m, &ev).unwrap();
    assert!(nnz0 <= m.nnz());
    // Pure time derivatives of S vanish at the point, so some entries drop.
    assert!(nnz0 < m.nnz());
}

/// Residual of one row against test fields, as a polynomial in `(E, S, X)`.
fn row_residual(
    m: &PolyMatrix,
    i: usize,
    table: &mut TimeJetTable,
    derivs: &mut HashMap<Term, Poly>,
    fields: &dyn Fn(UnknownId) -> Poly,
) -> Poly {
    let p = params();
    let mut field_deriv = |t: Term| -> Poly {
        if let Some(v) = derivs.get(&t) {
            return v.clone();
        }
        let mut u = fields(t.unknown);
        for a in Axis::ALL {
            for _ in 0..t.deriv.get(a) {
                u = Coefficient::derive(&u, a, &p).unwrap();
            }
        }
        derivs.insert(t, u.clone());
        u
    };
    let mut total = Poly::zero();
    for (j, c) in m.row(i) {
        let u = field_deriv(m.col_ids()[j].term());
        total = &total + &c.to_poly(table).unwrap().mul(&u).unwrap();
    }
    for e in m.rhs().iter().filter(|e| e.row as usize == i) {
        let u = field_deriv(e.term);
        total = &total - &e.coef.to_poly(table).unwrap().mul(&u).unwrap();
    }
    total
}

fn check_residual_invariant(n: u32, fields: &dyn Fn(UnknownId) -> Poly) {
    let p = params();
    let system = build_eliminated_system(&p).unwrap();
    let m = prolong(&to_jet_system(&system).unwrap(), n, &p).unwrap();
    let base: Vec<Poly> = system.iter().map(|e| e.residual(fields, &p).unwrap()).collect();
    let mut table = TimeJetTable::new(p.clone());
    let mut derivs = HashMap::new();
    for (i, id) in m.row_ids().iter().enumerate() {
        let mut expected = base[id.base_eq as usize - 1].clone();
        for a in Axis::ALL {
            for _ in 0..id.applied.get(a) {
                expected = Coefficient::derive(&expected, a, &p).unwrap();
            }
        }
        let got = row_residual(&m, i, &mut table, &mut derivs, fields);
        assert_eq!(got, expected, "row {id}");
    }
}

#[test]
fn rows_are_derivatives_of_the_residual_up_to_level_three() {
    let z1 = &Poly::monomial(2, [0, 0, 3, 1, 0]) + &Poly::monomial(-1, [1, 1, 0, 0, 2]);
    let z2 = &Poly::monomial(1, [0, 1, 1, 1, 1]) + &Poly::monomial(5, [0, 0, 0, 4, 0]);
    let phi = Poly::monomial(7, [0, 0, 1, 0, 2]);
    let fields = move |u: UnknownId| match u {
        UnknownId::Z1 => z1.clone(),
        UnknownId::Z2 => z2.clone(),
        UnknownId::Pi => Poly::zero(),
        _ => phi.clone(),
    };
    check_residual_invariant(3, &fields);
}

fn arb_field() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u16..=1, 0u16..=1, 0u16..=2, 0u16..=2, 0u16..=2, -4i64..=4), 0..4).prop_map(|t| {
        Poly::from_terms(t.into_iter().map(|(a, b, c, d, e, k)| (Monomial([a, b, c, d, e]), Rational::from_integer(k.into()))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_invariant_random_fields(z1 in arb_field(), z2 in arb_field(), phi in arb_field(), n in 0u32..=1) {
        let fields = move |u: UnknownId| match u {
            UnknownId::Z1 => z1.clone(),
            UnknownId::Z2 => z2.clone(),
            UnknownId::Pi => Poly::zero(),
            _ => phi.clone(),
        };
        check_residual_invariant(n, &fields);
    }
}

#[test]
fn rows_are_derivatives_of_the_residual_at_level_seven() {
    let z1 = &Poly::monomial(2, [0, 0, 6, 3, 2]) + &Poly::monomial(-1, [1, 1, 2, 5, 4]);
    let z2 = &Poly::monomial(1, [0, 1, 4, 4, 3]) + &Poly::monomial(5, [0, 0, 1, 4, 6]);
    let phi = Poly::monomial(7, [0, 0, 5, 0, 6]);
    let fields = move |u: UnknownId| match u {
        UnknownId::Z1 => z1.clone(),
        UnknownId::Z2 => z2.clone(),
        UnknownId::Pi => Poly::zero(),
        _ => phi.clone(),
    };
    check_residual_invariant(7, &fields);
}
