//! Evaluation at a point and structural linear algebra: null columns,
//! structural rank, Dulmage–Mendelsohn decomposition and the `(P 0; Q R)`
//! reordering.

mod dm;
mod matching;
mod pattern;
mod pqr;
mod reorder;

pub use dm::{dm_decompose, dm_with_matching, DmResult, FineBlock};
pub use matching::{maximum_matching, maximum_transversal, sprank, Matching};
pub use pattern::Pattern;
pub use pqr::{first_order_columns, target_column_check, PqrPartition, TargetCheck, Violation};
pub use reorder::{good_reordering, ReorderError, Reordering, SubSelection};

use num_traits::Zero;
use rayon::prelude::*;

use crate::pdesystem::CoeffError;
use crate::polyring::{DerivationParams, Point, Rational};
use crate::prolongation::{JetEvaluator, PolyMatrix};

/// Sparse matrix with exact rational entries (row-compressed, with a
/// column-compressed index).
#[derive(Debug, Clone, PartialEq)]
pub struct RatMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<Rational>,
    col_ptr: Vec<usize>,
    /// Position in `values` of the k-th entry in column order.
    csc_pos: Vec<usize>,
}

impl RatMatrix {
    /// Builds from per-row entry lists; zeros are dropped, columns sorted.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(u32, Rational)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for mut r in rows {
            r.retain(|(_, v)| !v.is_zero());
            r.sort_by_key(|e| e.0);
            for (j, v) in r {
                assert!((j as usize) < ncols, "column {j} out of range");
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        let mut counts = vec![0usize; ncols + 1];
        for &j in &col_idx {
            counts[j as usize + 1] += 1;
        }
        for j in 0..ncols {
            counts[j + 1] += counts[j];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut csc_pos = vec![0; col_idx.len()];
        for k in 0..col_idx.len() {
            let j = col_idx[k] as usize;
            csc_pos[next[j]] = k;
            next[j] += 1;
        }
        Self { nrows, ncols, row_ptr, col_idx, values, col_ptr, csc_pos }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, triplets: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        let mut rows: Vec<Vec<(u32, Rational)>> = vec![Vec::new(); nrows];
        for (i, j, v) in triplets {
            rows[i].push((j as u32, v));
        }
        Self::from_rows(ncols, rows)
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            ncols,
            rows.iter().map(|r| r.iter().enumerate().map(|(j, v)| (j as u32, v.clone())).collect()).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Rational)> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().map(|&j| j as usize).zip(&self.values[r])
    }

    /// `(row, value)` pairs of column `j`, rows ascending.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.csc_pos[self.col_ptr[j]..self.col_ptr[j + 1]].iter().map(move |&k| (self.row_of(k), &self.values[k]))
    }

    fn row_of(&self, k: usize) -> usize {
        self.row_ptr.partition_point(|&p| p <= k) - 1
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Rational> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].binary_search(&(j as u32)).ok().map(|k| &self.values[r.start + k])
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn pattern(&self) -> Pattern {
        Pattern::from_rows(
            self.ncols,
            (0..self.nrows).map(|i| self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]].to_vec()).collect(),
        )
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut map = vec![u32::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            map[c] = k as u32;
        }
        RatMatrix::from_rows(
            cols.len(),
            rows.iter()
                .map(|&r| {
                    self.row(r)
                        .filter(|(c, _)| map[*c] != u32::MAX)
                        .map(|(c, v)| (map[c], v.clone()))
                        .collect()
                })
                .collect(),
        )
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.ncols]; self.nrows];
        for (i, j, v) in self.entries() {
            out[i][j] = v.clone();
        }
        out
    }
}

/// An evaluated matrix together with the positions lost by evaluation.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub matrix: RatMatrix,
    /// `Θ∖Θ⁰`: identically nonzero entries that vanish at the point.
    pub theta_minus_theta0: Vec<(usize, usize)>,
}

/// Exact evaluation of every entry of `pm` at `point`.
pub fn evaluate_matrix(pm: &PolyMatrix, point: &Point, params: &DerivationParams) -> Result<Evaluated, CoeffError> {
    let ev = JetEvaluator::new(point.clone(), params.clone());
    let rows: Result<Vec<(Vec<(u32, Rational)>, Vec<u32>)>, CoeffError> = (0..pm.nrows())
        .into_par_iter()
        .map_init(
            || ev.clone(),
            |ev, i| {
                let mut kept = Vec::new();
                let mut lost = Vec::new();
                for (j, v) in pm.row(i) {
                    let x = ev.evaluate(v)?;
                    if x.is_zero() {
                        lost.push(j as u32);
                    } else {
                        kept.push((j as u32, x));
                    }
                }
                Ok((kept, lost))
            },
        )
        .collect();
    let mut kept_rows = Vec::with_capacity(pm.nrows());
    let mut theta_minus_theta0 = Vec::new();
    for (i, (kept, lost)) in rows?.into_iter().enumerate() {
        kept_rows.push(kept);
        theta_minus_theta0.extend(lost.into_iter().map(|j| (i, j as usize)));
    }
    Ok(Evaluated { matrix: RatMatrix::from_rows(pm.ncols(), kept_rows), theta_minus_theta0 })
}

/// Columns with no entry after evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullColumns {
    pub indices: Vec<usize>,
    /// True iff every such column is also identically zero symbolically.
    pub all_symbolically_null: bool,
    /// Evaluated-null columns that carry symbolic entries.
    pub symbolic_survivors: Vec<usize>,
}

impl NullColumns {
    pub fn count(&self) -> usize {
        self.indices.len()
    }
}

pub fn null_columns(pm: &PolyMatrix, rm: &RatMatrix) -> NullColumns {
    let indices: Vec<usize> = (0..rm.ncols()).filter(|&j| rm.col(j).next().is_none()).collect();
    let mut symbolic = vec![false; pm.ncols()];
    for i in 0..pm.nrows() {
        for &j in pm.row_cols(i) {
            symbolic[j as usize] = true;
        }
    }
    let symbolic_survivors: Vec<usize> = indices.iter().copied().filter(|&j| symbolic[j]).collect();
    NullColumns { all_symbolically_null: symbolic_survivors.is_empty(), indices, symbolic_survivors }
}
