//! Prolongation of the pressure-free system into a sparse polynomial matrix.
//!
//! Equations 1 and 2 are differentiated to every level `≤ n`, equation 3 to
//! every level `≤ n + 2`. Each level is derived from the previous one, one
//! parent per equation; within a level the work is spread over the rayon
//! pool and collected in index order, so the result does not depend on the
//! schedule.

mod jet;
mod matrix;
pub mod polymtx;

pub use jet::{JetEvaluator, JetPoly, JetTerm, TimeJetTable};
pub use matrix::{ColId, ColumnLayout, MatrixStats, PolyMatrix, RhsEntry, RowId};

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::combinatorics::{count_f, index_of, multiindices_of_degree, Axis, MultiIndex};
use crate::pdesystem::{CoeffError, Equation, UnknownId};
use crate::polyring::{DerivationParams, Poly};

#[derive(Debug, Error)]
pub enum ProlongError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("term {term} exceeds the column layout (max order {max_order})")]
    OutOfLayout { term: String, max_order: u32 },
    #[error("matrix is not a full prolongation: {0}")]
    Shape(String),
}

/// Extra levels for the third equation (first order, vs third for 1 and 2).
pub const EQ3_EXTRA_LEVELS: u32 = 2;

/// Highest level to which `base_eq` is prolonged for a build of level `n`.
pub fn level_of(base_eq: u8, n: u32) -> u32 {
    if base_eq == 3 {
        n + EQ3_EXTRA_LEVELS
    } else {
        n
    }
}

/// Highest derivative order appearing in a build of level `n`.
pub fn max_order(n: u32) -> u32 {
    n + 3
}

/// Derivative of `eq` along `axis` (Leibniz rule, level incremented).
pub fn derive_equation<C: crate::pdesystem::Coefficient>(
    eq: &Equation<C>,
    axis: Axis,
    params: &DerivationParams,
) -> Result<Equation<C>, CoeffError> {
    eq.derive(axis, params)
}

/// The parent of a level-`m` index: decrement the smallest axis with a
/// positive count. Returns the parent and the axis to differentiate along.
pub fn parent_of(applied: &MultiIndex) -> Option<(MultiIndex, Axis)> {
    Axis::ALL
        .into_iter()
        .find_map(|a| applied.decrement(a).map(|p| (p, a)))
}

/// Converts a polynomial system to jet coefficients.
pub fn to_jet_system(system: &[Equation<Poly>; 3]) -> Result<[Equation<JetPoly>; 3], CoeffError> {
    let a = system[0].map_coefficients(JetPoly::from_poly)?;
    let b = system[1].map_coefficients(JetPoly::from_poly)?;
    let c = system[2].map_coefficients(JetPoly::from_poly)?;
    Ok([a, b, c])
}

/// All derivatives of `base` up to `top`, grouped by level; `out[m][k]` is
/// the derivative by the `k`-th multi-index of degree `m`.
pub fn prolong_equation(
    base: &Equation<JetPoly>,
    top: u32,
    params: &DerivationParams,
) -> Result<Vec<Vec<Equation<JetPoly>>>, CoeffError> {
    let mut base = base.clone();
    base.level = 0;
    let mut levels = vec![vec![base]];
    for m in 1..=top {
        let prev = levels.last().expect("level 0 present");
        let offset = if m >= 2 { count_f(u64::from(m) - 2).expect("small") as usize } else { 0 };
        let next: Result<Vec<_>, CoeffError> = multiindices_of_degree(m)
            .par_iter()
            .map(|alpha| {
                let (parent, axis) = parent_of(alpha).expect("degree ≥ 1");
                let k = index_of(&parent) - offset;
                derive_equation(&prev[k], axis, params)
            })
            .collect();
        levels.push(next?);
    }
    Ok(levels)
}

fn equation_row(
    eq: &Equation<JetPoly>,
    layout: &ColumnLayout,
) -> Result<(Vec<(u32, JetPoly)>, Vec<(crate::pdesystem::Term, JetPoly)>), ProlongError> {
    let mut entries = Vec::with_capacity(eq.lhs.len());
    for (term, c) in &eq.lhs {
        let col = ColId { unknown: term.unknown, deriv: term.deriv };
        let j = layout.index(&col).ok_or_else(|| ProlongError::OutOfLayout {
            term: term.to_string(),
            max_order: layout.max_order,
        })?;
        entries.push((j as u32, c.clone()));
    }
    entries.sort_by_key(|e| e.0);
    let rhs = eq.rhs.iter().map(|(t, c)| (*t, c.clone())).collect();
    Ok((entries, rhs))
}

/// Prolongs the three equations to level `n` and assembles the matrix.
///
/// Rows are ordered by `(base_eq, index_of(applied))`; columns follow
/// [`ColumnLayout`] with maximal order `n + 3`. Dimensions are `G(n) × H(n)`.
pub fn prolong(
    system: &[Equation<JetPoly>; 3],
    n: u32,
    params: &DerivationParams,
) -> Result<PolyMatrix, ProlongError> {
    let layout = ColumnLayout::new(max_order(n));
    let mut out = PolyMatrix::new(layout.all());
    for (e, base) in system.iter().enumerate() {
        let base_eq = e as u8 + 1;
        let levels = prolong_equation(base, level_of(base_eq, n), params)?;
        for (m, level) in levels.into_iter().enumerate() {
            let alphas = multiindices_of_degree(m as u32);
            let rows: Result<Vec<_>, ProlongError> =
                level.par_iter().map(|eq| equation_row(eq, &layout)).collect();
            for (alpha, (entries, rhs)) in alphas.into_iter().zip(rows?) {
                out.push_row(RowId { base_eq, applied: alpha }, entries, rhs);
            }
        }
    }
    Ok(out)
}

/// Builds the eliminated system for `params` and prolongs it to level `n`.
pub fn build_matrix(n: u32, params: &DerivationParams) -> Result<PolyMatrix, Box<dyn std::error::Error + Send + Sync>> {
    let system = crate::pdesystem::build_eliminated_system(params)?;
    let jets = to_jet_system(&system)?;
    Ok(prolong(&jets, n, params)?)
}

/// Evaluated nonzero count (`|Θ⁰|`) at the evaluator's point.
pub fn evaluated_nnz(m: &PolyMatrix, evaluator: &JetEvaluator) -> Result<usize, CoeffError> {
    let counts: Result<Vec<usize>, CoeffError> = (0..m.nrows())
        .into_par_iter()
        .map_init(
            || evaluator.clone(),
            |ev, i| {
                let mut k = 0;
                for (_, v) in m.row(i) {
                    if !ev.evaluate(v)?.is_zero() {
                        k += 1;
                    }
                }
                Ok(k)
            },
        )
        .collect();
    Ok(counts?.into_iter().sum())
}

/// The six blocks `A_i` (z1 columns) and `B_i` (z2 columns) of equation `i`.
#[derive(Debug, Clone)]
pub struct SubmatrixBlocks {
    pub a: [PolyMatrix; 3],
    pub b: [PolyMatrix; 3],
}

pub fn submatrix_blocks(m: &PolyMatrix) -> Result<SubmatrixBlocks, ProlongError> {
    let z1 = m.cols_of_unknown(UnknownId::Z1);
    let z2 = m.cols_of_unknown(UnknownId::Z2);
    if z1.len() + z2.len() != m.ncols() {
        return Err(ProlongError::Shape("columns other than z1, z2".into()));
    }
    let rows: Vec<Vec<usize>> = (1..=3).map(|e| m.rows_of_equation(e)).collect();
    if rows.iter().map(Vec::len).sum::<usize>() != m.nrows() {
        return Err(ProlongError::Shape("rows outside equations 1–3".into()));
    }
    let a = [0, 1, 2].map(|e| m.select(&rows[e], &z1));
    let b = [0, 1, 2].map(|e| m.select(&rows[e], &z2));
    Ok(SubmatrixBlocks { a, b })
}

#[cfg(test)]
mod tests;
