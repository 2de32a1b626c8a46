//! The `(P 0; Q R)` partition and its checks.

use serde::{Deserialize, Serialize};

use crate::prolongation::{ColId, PolyMatrix};

/// Row/column split of a matrix into `(P 0; Q R)`.
///
/// `p_rows × p_cols` is the square block `P`; `p_rows × r_cols` is the
/// block that must be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PqrPartition {
    pub nrows: usize,
    pub ncols: usize,
    pub p_rows: Vec<usize>,
    pub p_cols: Vec<usize>,
    pub q_rows: Vec<usize>,
    pub r_cols: Vec<usize>,
}

/// An entry found inside the zero block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
}

impl PqrPartition {
    /// Completes `P` with the remaining rows and columns in ascending order.
    pub fn new(nrows: usize, ncols: usize, p_rows: Vec<usize>, p_cols: Vec<usize>) -> Self {
        let mut in_p = vec![false; nrows];
        p_rows.iter().for_each(|&i| in_p[i] = true);
        let q_rows = (0..nrows).filter(|&i| !in_p[i]).collect();
        let mut in_p = vec![false; ncols];
        p_cols.iter().for_each(|&j| in_p[j] = true);
        let r_cols = (0..ncols).filter(|&j| !in_p[j]).collect();
        Self { nrows, ncols, p_rows, p_cols, q_rows, r_cols }
    }

    pub fn p_size(&self) -> (usize, usize) {
        (self.p_rows.len(), self.p_cols.len())
    }

    pub fn zero_block_size(&self) -> (usize, usize) {
        (self.p_rows.len(), self.r_cols.len())
    }

    pub fn row_perm(&self) -> Vec<usize> {
        self.p_rows.iter().chain(&self.q_rows).copied().collect()
    }

    pub fn col_perm(&self) -> Vec<usize> {
        self.p_cols.iter().chain(&self.r_cols).copied().collect()
    }

    /// Entries of `positions` that fall in the zero block.
    pub fn violations(&self, positions: impl IntoIterator<Item = (usize, usize)>) -> Vec<Violation> {
        let mut p_row = vec![false; self.nrows];
        self.p_rows.iter().for_each(|&i| p_row[i] = true);
        let mut p_col = vec![false; self.ncols];
        self.p_cols.iter().for_each(|&j| p_col[j] = true);
        positions
            .into_iter()
            .filter(|&(i, j)| p_row[i] && !p_col[j])
            .map(|(row, col)| Violation { row, col })
            .collect()
    }

    /// Symbolic robustness: no identically-nonzero entry of `pm` may lie in
    /// the zero block.
    pub fn robustness(&self, pm: &PolyMatrix) -> Vec<Violation> {
        let rows: Vec<usize> = self.p_rows.clone();
        self.violations(rows.into_iter().flat_map(|i| pm.row_cols(i).iter().map(move |&j| (i, j as usize))))
    }
}

/// Positions (1-based) of the target columns within `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub all_in_p: bool,
    pub positions: Vec<Option<usize>>,
}

/// Locates each target column inside `partition.p_cols`.
pub fn target_column_check(partition: &PqrPartition, targets: &[usize]) -> TargetCheck {
    let positions: Vec<Option<usize>> = targets
        .iter()
        .map(|t| partition.p_cols.iter().position(|c| c == t).map(|k| k + 1))
        .collect();
    TargetCheck { all_in_p: positions.iter().all(Option::is_some), positions }
}

/// Column indices of `∂1z1, ∂2z1, ∂3z1, ∂1z2, ∂2z2, ∂3z2` in `cols`, if
/// all are present.
pub fn first_order_columns(cols: &[ColId]) -> Option<Vec<usize>> {
    use crate::combinatorics::{Axis, MultiIndex};
    use crate::pdesystem::UnknownId;
    let mut out = Vec::new();
    for u in [UnknownId::Z1, UnknownId::Z2] {
        for a in Axis::SPACE {
            let id = ColId { unknown: u, deriv: MultiIndex::unit(a) };
            out.push(cols.iter().position(|c| *c == id)?);
        }
    }
    Some(out)
}
