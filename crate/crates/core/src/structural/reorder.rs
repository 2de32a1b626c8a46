//! The reordering that exposes an invertible block `P` in `(P 0; Q R)` form.
//!
//! 1. Restrict to a sub-system `L̃`: equations 1–2 up to some level, the
//!    third two levels further, and columns up to the matching order.
//! 2. Coarse decomposition of `L̃⁰`; `L̄` is the matched square part of its
//!    overdetermined part (rows of `L̄` only touch columns of `L̄`).
//! 3. Fine decomposition of `L̄⁰`; `P` is its last diagonal block (a sink,
//!    so `P`'s rows only touch `P`'s columns).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prolongation::PolyMatrix;

use super::{dm_decompose, DmResult, Pattern, PqrPartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReorderError {
    #[error("the overdetermined part of the sub-system has no matched square block")]
    EmptyOverdetermined,
    #[error("fine decomposition produced no blocks")]
    NoBlocks,
    #[error("pattern is {pattern:?} but matrix is {matrix:?}")]
    Shape { pattern: (usize, usize), matrix: (usize, usize) },
}

/// Rows and columns kept in the sub-system `L̃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubSelection {
    /// Highest level kept for equations 1, 2, 3.
    pub eq_levels: [u32; 3],
    /// Highest derivative order kept among columns.
    pub max_col_order: u32,
}

impl SubSelection {
    /// Equations 1–2 to level `m`, equation 3 to `m + 2`, columns to `m + 3`.
    pub fn for_level(m: u32) -> Self {
        Self { eq_levels: [m, m, m + 2], max_col_order: m + 3 }
    }

    pub fn rows(&self, pm: &PolyMatrix) -> Vec<usize> {
        (0..pm.nrows())
            .filter(|&i| {
                let r = pm.row_ids()[i];
                r.applied.degree() <= self.eq_levels[r.base_eq as usize - 1]
            })
            .collect()
    }

    /// Selected columns in natural jet order (unknown, then enumeration).
    pub fn cols(&self, pm: &PolyMatrix) -> Vec<usize> {
        let mut cols: Vec<usize> =
            (0..pm.ncols()).filter(|&j| pm.col_ids()[j].deriv.degree() <= self.max_col_order).collect();
        cols.sort_by_key(|&j| pm.col_ids()[j].natural_key());
        cols
    }
}

/// Result of the reordering; all indices refer to the full matrix unless
/// noted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reordering {
    pub selection: SubSelection,
    pub selected_rows: Vec<usize>,
    pub selected_cols: Vec<usize>,
    /// Coarse decomposition of `L̃⁰` (indices local to the selection).
    pub coarse: DmResult,
    pub lbar_rows: Vec<usize>,
    pub lbar_cols: Vec<usize>,
    /// Fine decomposition of `L̄⁰` (indices local to `L̄`).
    pub fine: DmResult,
    pub partition: PqrPartition,
}

impl Reordering {
    pub fn block_count(&self) -> usize {
        self.fine.fine_blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.fine.fine_blocks.iter().map(|b| b.size()).collect()
    }
}

/// Runs the three steps on the evaluated pattern `pattern` of `pm`.
///
/// `P`'s rows keep the matrix row order; its columns are sorted by unknown
/// and then by derivative enumeration order.
pub fn good_reordering(pm: &PolyMatrix, pattern: &Pattern, selection: SubSelection) -> Result<Reordering, ReorderError> {
    if (pattern.nrows(), pattern.ncols()) != (pm.nrows(), pm.ncols()) {
        return Err(ReorderError::Shape {
            pattern: (pattern.nrows(), pattern.ncols()),
            matrix: (pm.nrows(), pm.ncols()),
        });
    }
    let selected_rows = selection.rows(pm);
    let selected_cols = selection.cols(pm);
    let tilde = pattern.select(&selected_rows, &selected_cols);
    let coarse = dm_decompose(&tilde);

    let (over_rows, over_cols) = coarse.over_matched();
    if over_rows.is_empty() {
        return Err(ReorderError::EmptyOverdetermined);
    }
    let mut lbar_rows: Vec<usize> = over_rows.iter().map(|&i| selected_rows[i]).collect();
    let mut lbar_cols: Vec<usize> = over_cols.iter().map(|&j| selected_cols[j]).collect();
    lbar_rows.sort_unstable();
    lbar_cols.sort_by_key(|&j| pm.col_ids()[j].natural_key());

    let bar = pattern.select(&lbar_rows, &lbar_cols);
    let fine = dm_decompose(&bar);
    let last = fine.fine_blocks.last().ok_or(ReorderError::NoBlocks)?;
    let (brows, bcols) = fine.block_indices(last);
    let mut p_rows: Vec<usize> = brows.into_iter().map(|i| lbar_rows[i]).collect();
    let mut p_cols: Vec<usize> = bcols.into_iter().map(|j| lbar_cols[j]).collect();
    p_rows.sort_unstable();
    p_cols.sort_by_key(|&j| pm.col_ids()[j].natural_key());
    let partition = PqrPartition::new(pm.nrows(), pm.ncols(), p_rows, p_cols);

    Ok(Reordering { selection, selected_rows, selected_cols, coarse, lbar_rows, lbar_cols, fine, partition })
}
