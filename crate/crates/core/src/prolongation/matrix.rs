use std::fmt;

use crate::combinatorics::{count_f, index_of, multiindex_of, MultiIndex};
use crate::pdesystem::{Term, UnknownId};

use super::jet::JetPoly;

/// Row label: equation `base_eq` (1-based) differentiated by `applied`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId {
    pub base_eq: u8,
    pub applied: MultiIndex,
}

impl fmt::Display for RowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} eq{}", self.applied, self.base_eq)
    }
}

/// Column label: the derivative `deriv` of `unknown` (`Z1` or `Z2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColId {
    pub unknown: UnknownId,
    pub deriv: MultiIndex,
}

impl ColId {
    pub fn term(&self) -> Term {
        Term::new(self.unknown, self.deriv)
    }

    /// `(unknown, index_of(deriv))`, the natural jet order.
    pub fn natural_key(&self) -> (UnknownId, usize) {
        (self.unknown, index_of(&self.deriv))
    }
}

impl fmt::Display for ColId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.deriv, self.unknown.name())
    }
}

/// Column numbering for derivatives of `z1`, `z2` up to `max_order`.
///
/// Columns 0–5 hold `∂1z1, ∂2z1, ∂3z1, ∂1z2, ∂2z2, ∂3z2`; the remaining
/// derivatives of `z1` follow in enumeration order, then those of `z2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnLayout {
    pub max_order: u32,
    per_unknown: usize,
}

impl ColumnLayout {
    pub fn new(max_order: u32) -> Self {
        let per_unknown = count_f(max_order as u64).expect("small order") as usize;
        Self { max_order, per_unknown }
    }

    pub fn ncols(&self) -> usize {
        2 * self.per_unknown
    }

    fn unknown_slot(u: UnknownId) -> Option<usize> {
        match u {
            UnknownId::Z1 => Some(0),
            UnknownId::Z2 => Some(1),
            _ => None,
        }
    }

    pub fn index(&self, col: &ColId) -> Option<usize> {
        if col.deriv.degree() > self.max_order {
            return None;
        }
        let u = Self::unknown_slot(col.unknown)?;
        let k = index_of(&col.deriv);
        if (1..=3).contains(&k) {
            return Some(3 * u + k - 1);
        }
        let rest = if k == 0 { 0 } else { k - 3 };
        Some(6 + u * (self.per_unknown - 3) + rest)
    }

    pub fn col(&self, index: usize) -> ColId {
        let (unknown, k) = if index < 6 {
            let u = if index < 3 { UnknownId::Z1 } else { UnknownId::Z2 };
            (u, index % 3 + 1)
        } else {
            let rest = index - 6;
            let (u, r) = if rest < self.per_unknown - 3 {
                (UnknownId::Z1, rest)
            } else {
                (UnknownId::Z2, rest - (self.per_unknown - 3))
            };
            (u, if r == 0 { 0 } else { r + 3 })
        };
        ColId { unknown, deriv: multiindex_of(k) }
    }

    pub fn all(&self) -> Vec<ColId> {
        (0..self.ncols()).map(|i| self.col(i)).collect()
    }
}

/// Right-hand-side entry: row `row` carries `coef · term` with `term` a
/// derivative of some `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsEntry {
    pub row: u32,
    pub term: Term,
    pub coef: JetPoly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixStats {
    pub nrows: usize,
    pub ncols: usize,
    pub nnz: usize,
    pub density: f64,
    pub avg_nnz_per_row: f64,
}

impl MatrixStats {
    pub fn from_counts(nrows: usize, ncols: usize, nnz: usize) -> Self {
        let cells = (nrows as f64) * (ncols as f64);
        Self {
            nrows,
            ncols,
            nnz,
            density: if cells > 0.0 { nnz as f64 / cells } else { 0.0 },
            avg_nnz_per_row: if nrows > 0 { nnz as f64 / nrows as f64 } else { 0.0 },
        }
    }
}

/// Sparse matrix with jet-polynomial entries, stored row-compressed.
///
/// Only identically-nonzero entries are stored; within a row, entries are
/// sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    rows: Vec<RowId>,
    cols: Vec<ColId>,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<JetPoly>,
    rhs: Vec<RhsEntry>,
}

impl PolyMatrix {
    pub fn new(cols: Vec<ColId>) -> Self {
        Self { rows: Vec::new(), cols, row_ptr: vec![0], col_idx: Vec::new(), values: Vec::new(), rhs: Vec::new() }
    }

    /// Appends a row; `entries` must be sorted by column with no zeros.
    pub fn push_row(&mut self, id: RowId, entries: Vec<(u32, JetPoly)>, rhs: Vec<(Term, JetPoly)>) {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        let row = self.rows.len() as u32;
        self.rows.push(id);
        for (c, v) in entries {
            debug_assert!(!v.is_empty());
            self.col_idx.push(c);
            self.values.push(v);
        }
        self.row_ptr.push(self.col_idx.len());
        self.rhs.extend(rhs.into_iter().map(|(term, coef)| RhsEntry { row, term, coef }));
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ids(&self) -> &[RowId] {
        &self.rows
    }

    pub fn col_ids(&self) -> &[ColId] {
        &self.cols
    }

    pub fn rhs(&self) -> &[RhsEntry] {
        &self.rhs
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &JetPoly)> {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().map(|&c| c as usize).zip(&self.values[range])
    }

    pub fn row_cols(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&JetPoly> {
        let cols = self.row_cols(i);
        cols.binary_search(&(j as u32)).ok().map(|k| &self.values[self.row_ptr[i] + k])
    }

    /// `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &JetPoly)> {
        (0..self.nrows()).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn stats(&self) -> MatrixStats {
        MatrixStats::from_counts(self.nrows(), self.ncols(), self.nnz())
    }

    /// Submatrix on the given rows and columns, in the given orders.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut new_col = vec![u32::MAX; self.ncols()];
        for (k, &c) in cols.iter().enumerate() {
            new_col[c] = k as u32;
        }
        let mut out = PolyMatrix::new(cols.iter().map(|&c| self.cols[c]).collect());
        for &r in rows {
            let mut entries: Vec<(u32, JetPoly)> = self
                .row(r)
                .filter(|(c, _)| new_col[*c] != u32::MAX)
                .map(|(c, v)| (new_col[c], v.clone()))
                .collect();
            entries.sort_by_key(|e| e.0);
            let rhs = self
                .rhs
                .iter()
                .filter(|e| e.row as usize == r)
                .map(|e| (e.term, e.coef.clone()))
                .collect();
            out.push_row(self.rows[r], entries, rhs);
        }
        out
    }

    /// Row indices belonging to base equation `eq` (1-based).
    pub fn rows_of_equation(&self, eq: u8) -> Vec<usize> {
        (0..self.nrows()).filter(|&i| self.rows[i].base_eq == eq).collect()
    }

    /// Column indices of `unknown`, sorted by the natural jet order.
    pub fn cols_of_unknown(&self, unknown: UnknownId) -> Vec<usize> {
        let mut cols: Vec<usize> = (0..self.ncols()).filter(|&j| self.cols[j].unknown == unknown).collect();
        cols.sort_by_key(|&j| self.cols[j].natural_key());
        cols
    }

    pub fn col_index(&self, id: &ColId) -> Option<usize> {
        self.cols.iter().position(|c| c == id)
    }
}
