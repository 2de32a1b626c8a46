use num_traits::Zero;
use proptest::prelude::*;

use super::*;
use crate::combinatorics::Axis::{T, X1, X2, X3};
use crate::polyring::{certification_point, Monomial, Rational};

fn params() -> DerivationParams {
    DerivationParams::default()
}

fn s_x(c: i64, x: [u16; 3]) -> Poly {
    Poly::monomial(c, [0, 1, x[0], x[1], x[2]])
}

#[test]
fn trajectory_components() {
    let f = build_trajectory(&params()).unwrap();
    // 2 S x1 x3 (x1² + x2²)
    assert_eq!(f.ybar[0], &s_x(2, [3, 0, 1]) + &s_x(2, [1, 2, 1]));
    assert_eq!(f.ybar[1], &s_x(2, [2, 1, 1]) + &s_x(2, [0, 3, 1]));
    assert_eq!(f.ybar[2], &s_x(-4, [2, 0, 2]) + &s_x(-4, [0, 2, 2]));
    assert!(f.divergence().is_identically_zero());
    let zero = f.with_zero_amplitude().unwrap();
    assert!(zero.ybar[0].is_identically_zero());
}

#[test]
fn trajectory_solves_momentum_equations() {
    let f = build_trajectory(&params()).unwrap();
    let check = check_trajectory_pde(&f, &params()).unwrap();
    assert!(check.holds(), "{:?}", check.residuals);
    let nu2 = DerivationParams::new(Rational::from_integer(2.into())).unwrap();
    let f2 = build_trajectory(&nu2).unwrap();
    assert!(verify_trajectory_pde(&f2, &nu2).unwrap());
}

#[test]
fn perturbed_trajectory_fails() {
    let mut f = build_trajectory(&params()).unwrap();
    f.ybar[0] = &f.ybar[0] + &Poly::var(Var::X1);
    let check = check_trajectory_pde(&f, &params()).unwrap();
    assert!(!check.holds());
    assert!(!check.residuals[0].is_identically_zero());
}

#[test]
fn zero_amplitude_trajectory_passes() {
    let f = build_trajectory(&params()).unwrap().with_zero_amplitude().unwrap();
    assert!(verify_trajectory_pde(&f, &params()).unwrap());
    assert!(f.pbar_x1.is_identically_zero());
}

#[test]
fn adjoint_coefficients() {
    use UnknownId::*;
    let f = build_trajectory(&params()).unwrap();
    let adj = build_adjoint_system(&f).unwrap();
    assert_eq!(adj[0].coefficient(&Term::of(Pi, &[X1])), Some(&Poly::from_int(-1)));
    // ∂1 ȳ¹ = 2 S x3 (3 x1² + x2²)
    let expected = &s_x(6, [2, 0, 1]) + &s_x(2, [0, 2, 1]);
    assert_eq!(adj[0].coefficient(&Term::of(Z1, &[])), Some(&expected));
    assert_eq!(adj[3].lhs.len(), 2);
    assert_eq!(adj[3].coefficient(&Term::of(Z1, &[X1])), Some(&Poly::from_int(-1)));
    assert_eq!(adj[3].coefficient(&Term::of(Z2, &[X2])), Some(&Poly::from_int(-1)));
}

#[test]
fn assembly_order_does_not_matter() {
    let f = build_trajectory(&params()).unwrap();
    let mut contributions = adjoint_contributions(&f).unwrap();
    let forward = assemble_adjoint(contributions.clone()).unwrap();
    contributions.reverse();
    let backward = assemble_adjoint(contributions.clone()).unwrap();
    assert_eq!(forward, backward);
    contributions.rotate_left(7);
    assert_eq!(forward, assemble_adjoint(contributions).unwrap());
    let a = eliminate_pressure(&forward, &params()).unwrap();
    let b = eliminate_pressure(&backward, &params()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn pressure_elimination_shape() {
    use UnknownId::*;
    let sys = build_eliminated_system(&params()).unwrap();
    for eq in &sys {
        assert!(eq.lhs.keys().all(|t| t.unknown != Pi));
    }
    assert_eq!(sys[0].order(), 3);
    assert_eq!(sys[1].order(), 3);
    assert_eq!(sys[2].order(), 1);
    assert_eq!(sys[0].coefficient(&Term::of(Z1, &[X3, T])), Some(&Poly::from_int(-1)));
    assert_eq!(sys[2].lhs.len(), 2);
    assert_eq!(sys[2].coefficient(&Term::of(Phi4, &[])), Some(&Poly::one()));
    assert_eq!(sys[0].coefficient(&Term::of(Phi1, &[X3])), Some(&Poly::one()));
    assert_eq!(sys[0].coefficient(&Term::of(Phi3, &[X1])), Some(&Poly::from_int(-1)));
    // twelve z-terms in each of the first two equations
    assert_eq!(sys[0].lhs.len(), 12);
    assert_eq!(sys[1].lhs.len(), 12);
}

#[test]
fn uncancelled_pressure_is_an_error() {
    let f = build_trajectory(&params()).unwrap();
    let mut adj = build_adjoint_system(&f).unwrap();
    adj[2].add_term(Term::of(UnknownId::Pi, &[X3]), Poly::from_int(-1)).unwrap();
    assert_eq!(
        eliminate_pressure(&adj, &params()),
        Err(SystemError::PressureNotEliminated { equation: 1 })
    );
}

#[test]
fn printed_system_coefficients() {
    use UnknownId::*;
    let sys = build_eliminated_system(&params()).unwrap();
    assert_eq!(
        sys[0].coefficient(&Term::of(Z1, &[X1])),
        Some(&(&s_x(-4, [3, 0, 0]) + &s_x(-4, [1, 2, 0])))
    );
    assert_eq!(
        sys[0].coefficient(&Term::of(Z1, &[X3])),
        Some(&(&s_x(14, [2, 0, 1]) + &s_x(10, [0, 2, 1])))
    );
    assert_eq!(
        sys[0].coefficient(&Term::of(Z1, &[X3, X3])),
        Some(&(&s_x(4, [2, 0, 2]) + &s_x(4, [0, 2, 2])))
    );
    assert_eq!(
        sys[1].coefficient(&Term::of(Z2, &[X2])),
        Some(&(&s_x(-4, [2, 1, 0]) + &s_x(-4, [0, 3, 0])))
    );
    let at = sys[0].coefficient(&Term::of(Z1, &[X1])).unwrap().evaluate(&certification_point());
    assert_eq!(at, crate::polyring::parse_rational("-583/50").unwrap());
}

#[test]
fn crosscheck_finds_only_documented_typos() {
    let sys = build_eliminated_system(&params()).unwrap();
    let report = crosscheck_syst1(&sys);
    assert!(report.passes(), "{:#?}", report.deviations);
    assert_eq!(report.deviations.len(), 3);
    assert!(report.matched >= 28);
}

#[test]
fn corrupted_system_fails_crosscheck() {
    let mut sys = build_eliminated_system(&params()).unwrap();
    let key = Term::of(UnknownId::Z1, &[X2]);
    let c = sys[0].lhs.get(&key).unwrap().clone();
    sys[0].lhs.insert(key, -&c);
    let report = crosscheck_syst1(&sys);
    assert!(!report.passes());
    assert_eq!(report.undocumented().count(), 1);
}

#[test]
fn corrected_transcription_equals_generated_system() {
    let sys = build_eliminated_system(&params()).unwrap();
    for (eq, lit) in sys.iter().zip(corrected_literal_syst1()) {
        let mut rebuilt = Equation::<Poly>::new(0);
        for (t, c) in lit {
            rebuilt.add_term(t, c).unwrap();
        }
        assert_eq!(&rebuilt, eq);
    }
}

fn arb_small_rational() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

/// Random polynomial in `(E, S, X)` of low degree, used as a test function.
fn arb_field() -> impl Strategy<Value = Poly> {
    prop::collection::vec((0u16..=1, 0u16..=1, 0u16..=3, 0u16..=3, 0u16..=3, arb_small_rational()), 0..5)
        .prop_map(|t| Poly::from_terms(t.into_iter().map(|(a, b, c, d, e, r)| (Monomial([a, b, c, d, e]), r))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_is_exact(z1 in arb_field(), z2 in arb_field(), pi in arb_field(),
                            phi in prop::array::uniform4(arb_field())) {
        let p = params();
        let f = build_trajectory(&p).unwrap();
        let adj = build_adjoint_system(&f).unwrap();
        let elim = eliminate_pressure(&adj, &p).unwrap();
        let fields = |u: UnknownId| match u {
            UnknownId::Z1 => z1.clone(),
            UnknownId::Z2 => z2.clone(),
            UnknownId::Pi => pi.clone(),
            UnknownId::Phi1 => phi[0].clone(),
            UnknownId::Phi2 => phi[1].clone(),
            UnknownId::Phi3 => phi[2].clone(),
            UnknownId::Phi4 => phi[3].clone(),
        };
        let r: Vec<Poly> = adj.iter().map(|e| e.residual(fields, &p).unwrap()).collect();
        let e1 = &r[0].derive_space(Var::X3) - &r[2].derive_space(Var::X1);
        let e2 = &r[1].derive_space(Var::X3) - &r[2].derive_space(Var::X2);
        prop_assert_eq!(elim[0].residual(fields, &p).unwrap(), e1);
        prop_assert_eq!(elim[1].residual(fields, &p).unwrap(), e2);
        prop_assert_eq!(elim[2].residual(fields, &p).unwrap(), r[3].clone());
    }

    #[test]
    fn generated_and_printed_residuals_agree(z1 in arb_field(), z2 in arb_field(),
                                             pt in prop::array::uniform5(arb_small_rational())) {
        let p = params();
        let sys = build_eliminated_system(&p).unwrap();
        let fields = |u: UnknownId| match u {
            UnknownId::Z1 => z1.clone(),
            UnknownId::Z2 => z2.clone(),
            _ => Poly::zero(),
        };
        for (eq, lit) in sys.iter().zip(corrected_literal_syst1()) {
            let mut printed = Equation::<Poly>::new(0);
            for (t, c) in lit {
                printed.add_term(t, c).unwrap();
            }
            let a = eq.residual(fields, &p).unwrap().evaluate(&pt);
            let b = printed.residual(fields, &p).unwrap().evaluate(&pt);
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn residual_of_zero_fields_is_zero() {
    let sys = build_eliminated_system(&params()).unwrap();
    let r = sys[0].residual(|_| Poly::zero(), &params()).unwrap();
    assert!(r.evaluate(&certification_point()).is_zero());
}
