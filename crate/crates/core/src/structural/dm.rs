//! Dulmage–Mendelsohn coarse and fine decompositions.

use std::collections::{BTreeSet, VecDeque};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::matching::{maximum_transversal, Matching};
use super::Pattern;

/// One diagonal block of the fine decomposition, in permuted coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineBlock {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl FineBlock {
    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

/// Block triangular form.
///
/// `row_perm[k]` / `col_perm[k]` give the original index placed at position
/// `k`. Rows are laid out as `[under | square | over]` and columns as
/// `[under-free | under-matched | square | over]`, so that
///
/// ```text
/// A11 A12 A13 A14
///  0   0  A23 A24
///  0   0   0  A34
///  0   0   0  A44
/// ```
///
/// with `A12`, `A23`, `A34` square with a matched (nonzero) diagonal. The
/// square part `A23` is further split into `fine_blocks`, upper block
/// triangular.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DmResult {
    pub nrows: usize,
    pub ncols: usize,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    /// Row boundaries `[0, under, under + square, over_matched_end, nrows]`.
    pub row_bounds: [usize; 5],
    /// Column boundaries `[0, under_free, under_end, square_end, ncols]`.
    pub col_bounds: [usize; 5],
    pub fine_blocks: Vec<FineBlock>,
    /// Column → row partial map of the maximum matching used.
    pub matching: Vec<Option<usize>>,
    pub sprank: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Under,
    Square,
    Over,
}

impl DmResult {
    /// Underdetermined rows/columns in permuted order.
    pub fn under(&self) -> (&[usize], &[usize]) {
        (&self.row_perm[..self.row_bounds[1]], &self.col_perm[..self.col_bounds[2]])
    }

    pub fn square(&self) -> (&[usize], &[usize]) {
        (
            &self.row_perm[self.row_bounds[1]..self.row_bounds[2]],
            &self.col_perm[self.col_bounds[2]..self.col_bounds[3]],
        )
    }

    /// The matched square part `A34` of the overdetermined part.
    pub fn over_matched(&self) -> (&[usize], &[usize]) {
        (
            &self.row_perm[self.row_bounds[2]..self.row_bounds[3]],
            &self.col_perm[self.col_bounds[3]..],
        )
    }

    /// Rows of the overdetermined part left unmatched (`A44`).
    pub fn over_unmatched_rows(&self) -> &[usize] {
        &self.row_perm[self.row_bounds[3]..]
    }

    /// Sizes of the three matched diagonal parts `A12`, `A23`, `A34`.
    pub fn part_sizes(&self) -> [usize; 3] {
        [
            self.row_bounds[1],
            self.row_bounds[2] - self.row_bounds[1],
            self.row_bounds[3] - self.row_bounds[2],
        ]
    }

    /// Original (rows, cols) of a fine block.
    pub fn block_indices(&self, b: &FineBlock) -> (Vec<usize>, Vec<usize>) {
        (self.row_perm[b.rows.clone()].to_vec(), self.col_perm[b.cols.clone()].to_vec())
    }

    /// Checks bijectivity, the staircase shape, matched diagonals and the
    /// fine block triangular form against `a`. Returns the first violation.
    pub fn validate(&self, a: &Pattern) -> Result<(), String> {
        if a.nrows() != self.nrows || a.ncols() != self.ncols {
            return Err("dimension mismatch".into());
        }
        let row_pos = inverse(&self.row_perm, self.nrows).ok_or("row_perm is not a bijection")?;
        let col_pos = inverse(&self.col_perm, self.ncols).ok_or("col_perm is not a bijection")?;
        let [_, ru, rs, ro, _] = self.row_bounds;
        let [_, cf, cu, cs, _] = self.col_bounds;
        if ru != cu - cf || rs - ru != cs - cu || ro - rs != self.ncols - cs {
            return Err("matched parts are not square".into());
        }
        if ru + (rs - ru) + (ro - rs) != self.sprank {
            return Err("part sizes do not sum to the structural rank".into());
        }
        let row_part = |p: usize| if p < ru { Part::Under } else if p < rs { Part::Square } else { Part::Over };
        let col_part = |q: usize| if q < cu { Part::Under } else if q < cs { Part::Square } else { Part::Over };
        let mut row_block = vec![usize::MAX; self.nrows];
        let mut col_block = vec![usize::MAX; self.ncols];
        for (k, b) in self.fine_blocks.iter().enumerate() {
            if b.rows.len() != b.cols.len() {
                return Err(format!("fine block {k} is not square"));
            }
            b.rows.clone().for_each(|p| row_block[p] = k);
            b.cols.clone().for_each(|q| col_block[q] = k);
        }
        if (ru..rs).any(|p| row_block[p] == usize::MAX) || (cu..cs).any(|q| col_block[q] == usize::MAX) {
            return Err("fine blocks do not cover the square part".into());
        }
        for (i, j) in a.positions() {
            let (p, q) = (row_pos[i], col_pos[j]);
            let (rp, cp) = (row_part(p), col_part(q));
            let ok = match rp {
                Part::Under => true,
                Part::Square => cp != Part::Under && (cp == Part::Over || row_block[p] <= col_block[q]),
                Part::Over => cp == Part::Over,
            };
            if !ok {
                return Err(format!("entry ({i}, {j}) at permuted ({p}, {q}) breaks the block form"));
            }
        }
        // Matched diagonals of A12, A23, A34.
        let diagonal = (0..ru).map(|k| (k, cf + k)).chain((ru..rs).map(|k| (k, cu + (k - ru)))).chain((rs..ro).map(|k| (k, cs + (k - rs))));
        for (p, q) in diagonal {
            if !a.contains(self.row_perm[p], self.col_perm[q]) {
                return Err(format!("missing diagonal entry at permuted ({p}, {q})"));
            }
        }
        Ok(())
    }
}

fn inverse(perm: &[usize], n: usize) -> Option<Vec<usize>> {
    if perm.len() != n {
        return None;
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in perm.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return None;
        }
        pos[v] = k;
    }
    Some(pos)
}

/// Coarse and fine decomposition of `a`, using [`maximum_transversal`].
pub fn dm_decompose(a: &Pattern) -> DmResult {
    let m = maximum_transversal(a);
    dm_with_matching(a, &m)
}

/// Decomposition relative to a given maximum matching.
pub fn dm_with_matching(a: &Pattern, m: &Matching) -> DmResult {
    let (n, nc) = (a.nrows(), a.ncols());
    let at = a.transpose();

    // Columns reachable from free columns: col -> any row -> matched col.
    let mut under_col = vec![false; nc];
    let mut under_row = vec![false; n];
    let mut queue: VecDeque<usize> = (0..nc).filter(|&j| m.col_to_row[j].is_none()).collect();
    queue.iter().for_each(|&j| under_col[j] = true);
    while let Some(j) = queue.pop_front() {
        for &i in at.row(j) {
            let i = i as usize;
            if !under_row[i] {
                under_row[i] = true;
                let c = m.row_to_col[i].expect("maximum matching");
                if !under_col[c] {
                    under_col[c] = true;
                    queue.push_back(c);
                }
            }
        }
    }

    // Rows reachable from free rows: row -> any col -> matched row.
    let mut over_row = vec![false; n];
    let mut over_col = vec![false; nc];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| m.row_to_col[i].is_none()).collect();
    queue.iter().for_each(|&i| over_row[i] = true);
    while let Some(i) = queue.pop_front() {
        for &j in a.row(i) {
            let j = j as usize;
            if !over_col[j] {
                over_col[j] = true;
                let r = m.col_to_row[j].expect("maximum matching");
                if !over_row[r] {
                    over_row[r] = true;
                    queue.push_back(r);
                }
            }
        }
    }

    // Underdetermined: rows ascending, matched columns alongside.
    let under_rows: Vec<usize> = (0..n).filter(|&i| under_row[i]).collect();
    let under_free: Vec<usize> = (0..nc).filter(|&j| m.col_to_row[j].is_none()).collect();
    let under_matched: Vec<usize> = under_rows.iter().map(|&i| m.row_to_col[i].unwrap()).collect();

    // Overdetermined: matched rows follow their columns (ascending).
    let over_cols: Vec<usize> = (0..nc).filter(|&j| over_col[j]).collect();
    let over_matched_rows: Vec<usize> = over_cols.iter().map(|&j| m.col_to_row[j].unwrap()).collect();
    let over_free_rows: Vec<usize> = (0..n).filter(|&i| m.row_to_col[i].is_none()).collect();

    // Square part and its fine decomposition.
    let square_cols: Vec<usize> = (0..nc).filter(|&j| !under_col[j] && !over_col[j]).collect();
    let (blocks, square_order) = fine_blocks(a, m, &square_cols);

    let mut row_perm = under_rows.clone();
    let mut col_perm = under_free.clone();
    col_perm.extend(&under_matched);
    let mut fine = Vec::with_capacity(blocks.len());
    let (r0, c0) = (row_perm.len(), col_perm.len());
    let mut offset = 0;
    for len in blocks {
        fine.push(FineBlock { rows: r0 + offset..r0 + offset + len, cols: c0 + offset..c0 + offset + len });
        offset += len;
    }
    row_perm.extend(square_order.iter().map(|&j| m.col_to_row[j].unwrap()));
    col_perm.extend(&square_order);
    let row_bounds1 = under_rows.len();
    let row_bounds2 = row_perm.len();
    row_perm.extend(&over_matched_rows);
    let row_bounds3 = row_perm.len();
    row_perm.extend(&over_free_rows);
    col_perm.extend(&over_cols);

    DmResult {
        nrows: n,
        ncols: nc,
        row_perm,
        col_perm,
        row_bounds: [0, row_bounds1, row_bounds2, row_bounds3, n],
        col_bounds: [0, under_free.len(), under_free.len() + under_matched.len(), under_free.len() + under_matched.len() + square_cols.len(), nc],
        fine_blocks: fine,
        matching: m.col_to_row.clone(),
        sprank: m.size(),
    }
}

/// Strongly connected components of the square part, ordered so that the
/// result is upper block triangular. Returns block sizes and the column
/// order.
///
/// Order: Kahn's algorithm on the component DAG choosing, among ready
/// components, the one with the smallest column; the largest sink component
/// (ties: smallest column) is held back and placed last.
fn fine_blocks(a: &Pattern, m: &Matching, cols: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let k = cols.len();
    if k == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut local = vec![usize::MAX; a.ncols()];
    for (t, &c) in cols.iter().enumerate() {
        local[c] = t;
    }
    // Edge c -> c' when the row matched to c has an entry in c'.
    let succ: Vec<Vec<usize>> = cols
        .iter()
        .map(|&c| {
            let r = m.col_to_row[c].unwrap();
            a.row(r).iter().map(|&j| local[j as usize]).filter(|&t| t != usize::MAX).collect()
        })
        .collect();
    let comp = tarjan(&succ);
    let ncomp = comp.iter().max().map_or(0, |&c| c + 1);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for t in 0..k {
        members[comp[t]].push(t);
    }
    let mut out_edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
    for t in 0..k {
        for &u in &succ[t] {
            if comp[u] != comp[t] {
                out_edges[comp[t]].insert(comp[u]);
            }
        }
    }
    let mut indeg = vec![0usize; ncomp];
    for e in &out_edges {
        for &v in e {
            indeg[v] += 1;
        }
    }
    let min_col = |c: usize| members[c].iter().map(|&t| cols[t]).min().unwrap();
    let last = (0..ncomp)
        .filter(|&c| out_edges[c].is_empty())
        .max_by_key(|&c| (members[c].len(), std::cmp::Reverse(min_col(c))))
        .expect("a DAG has a sink");

    let mut ready: BTreeSet<(usize, usize)> = (0..ncomp).filter(|&c| indeg[c] == 0).map(|c| (min_col(c), c)).collect();
    let mut order = Vec::with_capacity(ncomp);
    while let Some(&(key, c)) = ready.iter().find(|&&(_, c)| c != last) {
        ready.remove(&(key, c));
        order.push(c);
        for &v in &out_edges[c] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.insert((min_col(v), v));
            }
        }
    }
    debug_assert_eq!(ready.len(), 1);
    order.push(last);

    let sizes = order.iter().map(|&c| members[c].len()).collect();
    let col_order = order
        .iter()
        .flat_map(|&c| {
            let mut cs: Vec<usize> = members[c].iter().map(|&t| cols[t]).collect();
            cs.sort_unstable();
            cs
        })
        .collect();
    (sizes, col_order)
}

/// Iterative Tarjan; returns a component id per vertex.
fn tarjan(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut e)) = call.last_mut() {
            if *e < succ[v].len() {
                let w = succ[v][*e];
                *e += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}
