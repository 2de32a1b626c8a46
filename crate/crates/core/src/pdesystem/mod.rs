//! Symbolic construction of the trajectory, the adjoint linearized system
//! and its pressure-free form.
//!
//! Everything is built on the polynomial branch of the trajectory
//! (`b(w) = w`, `c(x3) = x3²`), where `ȳ` is an explicit element of
//! `ℚ[E, S, X]`.

mod equation;
mod syst1;

pub use equation::{CoeffError, Coefficient, Equation, Term, UnknownId};
pub use syst1::{crosscheck_syst1, literal_syst1, Deviation, Syst1Report, Typo, documented_typos, corrected_literal_syst1};

use thiserror::Error;

use crate::combinatorics::Axis;
use crate::polyring::{DerivationParams, Poly, PolyError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("pressure did not cancel in equation {equation}")]
    PressureNotEliminated { equation: usize },
}

/// Components of `ȳ` and the space derivatives of `p̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFields {
    pub ybar: [Poly; 3],
    pub pbar_x1: Poly,
    pub pbar_x2: Poly,
}

/// `g`, `h` and the pressure integrand in the chart `(t, w, x3)`.
///
/// The chart variable `w` is stored in the `X1` slot and substituted by
/// `X1² + X2²` afterwards.
struct Chart {
    g: Poly,
    h: Poly,
}

const W: Var = Var::X1;

fn r_squared() -> Result<Poly, PolyError> {
    Ok(&Poly::var(Var::X1).pow(2)? + &Poly::var(Var::X2).pow(2)?)
}

impl Chart {
    fn local_branch() -> Result<Self, PolyError> {
        let s = Poly::var(Var::S);
        let b = Poly::var(W);
        let c = Poly::var(Var::X3).pow(2)?;
        let c_prime = c.derive_var(Var::X3);
        let w_b_prime = Poly::var(W).mul(&b.derive_var(W))?;
        // g = ε a b(w) c'(x3),  h = -2 ε a (b + w b') c(x3)
        let g = s.mul(&b)?.mul(&c_prime)?;
        let h = s.mul(&(&b + &w_b_prime))?.mul(&c)?.scale_int(-2);
        Ok(Self { g, h })
    }

    /// Integrand of the pressure:
    /// `∂t g − (4w ∂²ww g + 8 ∂w g + ∂²33 g) + 2w g ∂w g + g² + h ∂3 g`.
    fn pressure_integrand(&self, params: &DerivationParams) -> Result<Poly, PolyError> {
        let g = &self.g;
        let w = Poly::var(W);
        let g_w = g.derive_var(W);
        let g_ww = g_w.derive_var(W);
        let g_33 = g.derive_var(Var::X3).derive_var(Var::X3);
        let diffusion = &(&w.mul(&g_ww)?.scale_int(4) + &g_w.scale_int(8)) + &g_33;
        let mut out = &g.derive_time(params)? - &diffusion;
        out = &out + &w.mul(g)?.mul(&g_w)?.scale_int(2);
        out = &out + &g.mul(g)?;
        out = &out + &self.h.mul(&g.derive_var(Var::X3))?;
        Ok(out)
    }
}

/// Builds `ȳ = (g x1, g x2, h)` with `g, h` evaluated at `w = x1² + x2²`,
/// together with `∂1 p̄ = −x1·I(r²)` and `∂2 p̄ = −x2·I(r²)`.
pub fn build_trajectory(params: &DerivationParams) -> Result<TrajectoryFields, SystemError> {
    let chart = Chart::local_branch()?;
    let r2 = r_squared()?;
    let g = chart.g.substitute(W, &r2)?;
    let h = chart.h.substitute(W, &r2)?;
    let integrand = chart.pressure_integrand(params)?.substitute(W, &r2)?;
    let ybar = [g.mul(&Poly::var(Var::X1))?, g.mul(&Poly::var(Var::X2))?, h];
    Ok(TrajectoryFields {
        ybar,
        pbar_x1: -&Poly::var(Var::X1).mul(&integrand)?,
        pbar_x2: -&Poly::var(Var::X2).mul(&integrand)?,
    })
}

impl TrajectoryFields {
    pub fn divergence(&self) -> Poly {
        let [y1, y2, y3] = &self.ybar;
        &(&y1.derive_space(Var::X1) + &y2.derive_space(Var::X2)) + &y3.derive_space(Var::X3)
    }

    /// Sets `S = 0` in every field.
    pub fn with_zero_amplitude(&self) -> Result<Self, PolyError> {
        let kill = |p: &Poly| p.substitute(Var::S, &Poly::zero());
        Ok(Self {
            ybar: [kill(&self.ybar[0])?, kill(&self.ybar[1])?, kill(&self.ybar[2])?],
            pbar_x1: kill(&self.pbar_x1)?,
            pbar_x2: kill(&self.pbar_x2)?,
        })
    }
}

fn laplacian(p: &Poly) -> Poly {
    [Var::X1, Var::X2, Var::X3]
        .iter()
        .fold(Poly::zero(), |acc, &v| &acc + &p.derive_space(v).derive_space(v))
}

fn advect(ybar: &[Poly; 3], p: &Poly) -> Result<Poly, PolyError> {
    let mut out = Poly::zero();
    for (yi, v) in ybar.iter().zip([Var::X1, Var::X2, Var::X3]) {
        out = &out + &yi.mul(&p.derive_space(v))?;
    }
    Ok(out)
}

/// Outcome of checking the momentum equations satisfied by the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCheck {
    pub divergence: Poly,
    pub residuals: [Poly; 2],
}

impl TrajectoryCheck {
    pub fn holds(&self) -> bool {
        self.divergence.is_identically_zero() && self.residuals.iter().all(Poly::is_identically_zero)
    }
}

/// Residuals of `ȳᵏ_t − Δȳᵏ + (ȳ·∇)ȳᵏ + ∂k p̄` for `k = 1, 2` and of `div ȳ`.
pub fn check_trajectory_pde(
    fields: &TrajectoryFields,
    params: &DerivationParams,
) -> Result<TrajectoryCheck, SystemError> {
    let mut residuals = [Poly::zero(), Poly::zero()];
    for (k, pk) in [&fields.pbar_x1, &fields.pbar_x2].into_iter().enumerate() {
        let y = &fields.ybar[k];
        let mut r = &y.derive_time(params)? - &laplacian(y);
        r = &r + &advect(&fields.ybar, y)?;
        residuals[k] = &r + pk;
    }
    Ok(TrajectoryCheck { divergence: fields.divergence(), residuals })
}

/// True iff both momentum residuals and the divergence vanish identically.
pub fn verify_trajectory_pde(fields: &TrajectoryFields, params: &DerivationParams) -> Result<bool, SystemError> {
    Ok(check_trajectory_pde(fields, params)?.holds())
}

/// Raw `(equation, term, coefficient)` contributions of the adjoint system,
/// in a fixed but otherwise arbitrary order.
pub fn adjoint_contributions(fields: &TrajectoryFields) -> Result<Vec<(usize, Term, Poly)>, SystemError> {
    use UnknownId::*;
    let y = &fields.ybar;
    let one = Poly::one();
    let minus_one = Poly::from_int(-1);
    let space = [(Axis::X1, Var::X1), (Axis::X2, Var::X2), (Axis::X3, Var::X3)];
    let mut out = Vec::new();
    for (k, z, phi) in [(0usize, Z1, Phi1), (1, Z2, Phi2)] {
        let (axis_k, var_k) = space[k];
        out.push((k, Term::of(z, &[Axis::T]), minus_one.clone()));
        for (axis, _) in space {
            out.push((k, Term::of(z, &[axis, axis]), minus_one.clone()));
        }
        for ((axis, _), yi) in space.iter().zip(y) {
            out.push((k, Term::of(z, &[*axis]), -yi));
        }
        out.push((k, Term::of(Z1, &[]), y[0].derive_space(var_k)));
        out.push((k, Term::of(Z2, &[]), y[1].derive_space(var_k)));
        out.push((k, Term::of(Pi, &[axis_k]), minus_one.clone()));
        out.push((k, Term::of(phi, &[]), one.clone()));
    }
    out.push((2, Term::of(Z1, &[]), y[0].derive_space(Var::X3)));
    out.push((2, Term::of(Z2, &[]), y[1].derive_space(Var::X3)));
    out.push((2, Term::of(Pi, &[Axis::X3]), minus_one.clone()));
    out.push((2, Term::of(Phi3, &[]), one.clone()));
    out.push((3, Term::of(Z1, &[Axis::X1]), minus_one.clone()));
    out.push((3, Term::of(Z2, &[Axis::X2]), minus_one));
    out.push((3, Term::of(Phi4, &[]), one));
    Ok(out)
}

/// Accumulates contributions into four equations.
pub fn assemble_adjoint<I>(contributions: I) -> Result<[Equation<Poly>; 4], SystemError>
where
    I: IntoIterator<Item = (usize, Term, Poly)>,
{
    let mut eqs = [Equation::new(0), Equation::new(0), Equation::new(0), Equation::new(0)];
    for (k, term, c) in contributions {
        eqs[k].add_term(term, c)?;
    }
    Ok(eqs)
}

/// The adjoint system in `(z1, z2, π)` with right-hand sides `φ¹…φ⁴`.
pub fn build_adjoint_system(fields: &TrajectoryFields) -> Result<[Equation<Poly>; 4], SystemError> {
    assemble_adjoint(adjoint_contributions(fields)?)
}

/// Applies `∂3` to the first two adjoint equations and removes `π` with the
/// third: `∂3(L1) − ∂1(L3)`, `∂3(L2) − ∂2(L3)`, `L4`.
pub fn eliminate_pressure(
    adjoint: &[Equation<Poly>; 4],
    params: &DerivationParams,
) -> Result<[Equation<Poly>; 3], SystemError> {
    let third_1 = adjoint[2].derive(Axis::X1, params)?;
    let third_2 = adjoint[2].derive(Axis::X2, params)?;
    let mut first = adjoint[0].derive(Axis::X3, params)?.try_sub(&third_1)?;
    let mut second = adjoint[1].derive(Axis::X3, params)?.try_sub(&third_2)?;
    let mut third = adjoint[3].clone();
    for (i, eq) in [&mut first, &mut second, &mut third].into_iter().enumerate() {
        if eq.lhs.keys().any(|t| t.unknown == UnknownId::Pi) {
            return Err(SystemError::PressureNotEliminated { equation: i + 1 });
        }
        eq.level = 0;
    }
    Ok([first, second, third])
}

/// Trajectory → adjoint → pressure elimination, in one call.
pub fn build_eliminated_system(params: &DerivationParams) -> Result<[Equation<Poly>; 3], SystemError> {
    let fields = build_trajectory(params)?;
    let adjoint = build_adjoint_system(&fields)?;
    eliminate_pressure(&adjoint, params)
}

#[cfg(test)]
mod tests;
