/// Nonzero pattern of a sparse matrix in row-compressed form.
///
/// Column indices are sorted and unique within each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl Pattern {
    /// Builds a pattern from `(row, col)` positions; duplicates are merged.
    pub fn from_positions(nrows: usize, ncols: usize, positions: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); nrows];
        for (i, j) in positions {
            assert!(i < nrows && j < ncols, "position ({i}, {j}) outside {nrows}x{ncols}");
            rows[i].push(j as u32);
        }
        Self::from_rows(ncols, rows)
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<u32>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            col_idx.extend(r);
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx }
    }

    pub fn from_dense(rows: &[Vec<bool>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j as u32).collect())
            .collect();
        Self::from_rows(ncols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.row(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).iter().map(move |&j| (i, j as usize)))
    }

    pub fn transpose(&self) -> Pattern {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); self.ncols];
        for (i, j) in self.positions() {
            rows[j].push(i as u32);
        }
        Pattern { nrows: self.ncols, ncols: self.nrows, row_ptr: prefix(&rows), col_idx: rows.concat() }
    }

    /// Submatrix on `rows × cols`, renumbered in the given orders.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Pattern {
        let mut map = vec![u32::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            map[c] = k as u32;
        }
        let picked = rows
            .iter()
            .map(|&r| self.row(r).iter().map(|&c| map[c as usize]).filter(|&c| c != u32::MAX).collect())
            .collect();
        Self::from_rows(cols.len(), picked)
    }

    /// Indices of columns with no entry.
    pub fn empty_columns(&self) -> Vec<usize> {
        let mut seen = vec![false; self.ncols];
        for &j in &self.col_idx {
            seen[j as usize] = true;
        }
        (0..self.ncols).filter(|&j| !seen[j]).collect()
    }
}

fn prefix(rows: &[Vec<u32>]) -> Vec<usize> {
    let mut ptr = Vec::with_capacity(rows.len() + 1);
    ptr.push(0);
    for r in rows {
        ptr.push(ptr.last().unwrap() + r.len());
    }
    ptr
}
