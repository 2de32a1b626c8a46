//! Maximum bipartite matching between rows and columns (Hopcroft–Karp).

use std::collections::VecDeque;

use super::Pattern;

const NIL: u32 = u32::MAX;

/// A matching; `row_to_col[i]` and `col_to_row[j]` are mutually inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub row_to_col: Vec<Option<usize>>,
    pub col_to_row: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.row_to_col.iter().filter(|m| m.is_some()).count()
    }

    /// True iff every matched pair is an entry and the maps are inverse.
    pub fn is_valid(&self, a: &Pattern) -> bool {
        if self.row_to_col.len() != a.nrows() || self.col_to_row.len() != a.ncols() {
            return false;
        }
        let rows_ok = self.row_to_col.iter().enumerate().all(|(i, m)| match m {
            Some(j) => a.contains(i, *j) && self.col_to_row[*j] == Some(i),
            None => true,
        });
        let cols_ok = self.col_to_row.iter().enumerate().all(|(j, m)| match m {
            Some(i) => self.row_to_col[*i] == Some(j),
            None => true,
        });
        rows_ok && cols_ok
    }

    /// True iff no augmenting path exists (Berge), so the matching is maximum.
    pub fn is_maximum(&self, a: &Pattern) -> bool {
        let mut seen_col = vec![false; a.ncols()];
        let mut seen_row = vec![false; a.nrows()];
        let mut queue: VecDeque<usize> = (0..a.nrows()).filter(|&i| self.row_to_col[i].is_none()).collect();
        for &i in &queue {
            seen_row[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            for &j in a.row(i) {
                let j = j as usize;
                if seen_col[j] {
                    continue;
                }
                seen_col[j] = true;
                match self.col_to_row[j] {
                    None => return false,
                    Some(r) if !seen_row[r] => {
                        seen_row[r] = true;
                        queue.push_back(r);
                    }
                    Some(_) => {}
                }
            }
        }
        true
    }
}

/// Hopcroft–Karp maximum matching, deterministic: rows are processed in
/// ascending order and their columns in ascending order.
pub fn maximum_matching(a: &Pattern) -> Matching {
    let (n, m) = (a.nrows(), a.ncols());
    let mut pair_row = vec![NIL; n];
    let mut pair_col = vec![NIL; m];

    // Cheap greedy start.
    for i in 0..n {
        if let Some(&j) = a.row(i).iter().find(|&&j| pair_col[j as usize] == NIL) {
            pair_row[i] = j;
            pair_col[j as usize] = i as u32;
        }
    }

    let mut dist = vec![u32::MAX; n];
    let mut next_edge = vec![0usize; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    loop {
        // Layered BFS from free rows.
        queue.clear();
        for i in 0..n {
            if pair_row[i] == NIL {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = u32::MAX;
            }
        }
        let mut limit = u32::MAX;
        while let Some(i) = queue.pop_front() {
            if dist[i] >= limit {
                continue;
            }
            for &j in a.row(i) {
                let w = pair_col[j as usize];
                if w == NIL {
                    limit = limit.min(dist[i] + 1);
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[i] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        if limit == u32::MAX {
            break;
        }

        // Vertex-disjoint shortest augmenting paths by iterative DFS.
        next_edge.iter_mut().for_each(|e| *e = 0);
        let mut augmented = false;
        for root in 0..n {
            if pair_row[root] != NIL {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&x) = stack.last() {
                let row = a.row(x);
                if next_edge[x] == row.len() {
                    dist[x] = u32::MAX;
                    stack.pop();
                    continue;
                }
                let j = row[next_edge[x]] as usize;
                next_edge[x] += 1;
                let w = pair_col[j];
                if w == NIL {
                    if dist[x] + 1 != limit {
                        continue;
                    }
                    for &y in stack.iter() {
                        let jy = a.row(y)[next_edge[y] - 1];
                        pair_row[y] = jy;
                        pair_col[jy as usize] = y as u32;
                    }
                    for &y in stack.iter() {
                        dist[y] = u32::MAX;
                    }
                    augmented = true;
                    break;
                } else if dist[w as usize] == dist[x] + 1 {
                    stack.push(w as usize);
                }
            }
        }
        if !augmented {
            break;
        }
    }

    let opt = |v: u32| (v != NIL).then_some(v as usize);
    Matching {
        row_to_col: pair_row.into_iter().map(opt).collect(),
        col_to_row: pair_col.into_iter().map(opt).collect(),
    }
}

/// Structural rank: the size of a maximum matching.
pub fn sprank(a: &Pattern) -> usize {
    maximum_matching(a).size()
}

/// Maximum transversal by depth-first augmentation with cheap assignment.
///
/// Augments from the side with more nonempty lines (columns unless there
/// are strictly fewer nonempty rows than nonempty columns, in which case
/// rows), in ascending order, each line scanning its entries in ascending
/// order. This is the convention of common sparse direct solvers, so the
/// matched rows of the overdetermined part agree with theirs.
pub fn maximum_transversal(a: &Pattern) -> Matching {
    let at = a.transpose();
    let nonempty = |p: &Pattern| (0..p.nrows()).filter(|&i| !p.row(i).is_empty()).count();
    let (m2, n2) = (nonempty(a), nonempty(&at));
    let from_rows = m2 < n2;
    let (left, right_len) = if from_rows { (a, a.ncols()) } else { (&at, a.nrows()) };
    let left_match = augment_all(left, right_len);

    let mut row_to_col = vec![None; a.nrows()];
    let mut col_to_row = vec![None; a.ncols()];
    for (l, r) in left_match.iter().enumerate() {
        if let Some(r) = *r {
            let (i, j) = if from_rows { (l, r) } else { (r, l) };
            row_to_col[i] = Some(j);
            col_to_row[j] = Some(i);
        }
    }
    Matching { row_to_col, col_to_row }
}

/// Augments from every left vertex in order; returns left → right.
fn augment_all(left: &Pattern, right_len: usize) -> Vec<Option<usize>> {
    let n = left.nrows();
    let mut right_match = vec![NIL; right_len];
    let mut cheap: Vec<usize> = vec![0; n];
    let mut mark = vec![usize::MAX; n];
    let mut js: Vec<usize> = vec![0; n];
    let mut is: Vec<u32> = vec![0; n];
    let mut ps: Vec<usize> = vec![0; n];
    for k in 0..n {
        let mut found = false;
        let mut head: isize = 0;
        js[0] = k;
        while head >= 0 {
            let h = head as usize;
            let j = js[h];
            let adj = left.row(j);
            if mark[j] != k {
                mark[j] = k;
                let mut p = cheap[j];
                let mut hit = NIL;
                while p < adj.len() && !found {
                    hit = adj[p];
                    found = right_match[hit as usize] == NIL;
                    p += 1;
                }
                cheap[j] = p;
                if found {
                    is[h] = hit;
                    break;
                }
                ps[h] = 0;
            }
            let mut p = ps[h];
            while p < adj.len() {
                let i = adj[p];
                let owner = right_match[i as usize] as usize;
                if mark[owner] == k {
                    p += 1;
                    continue;
                }
                ps[h] = p + 1;
                is[h] = i;
                head += 1;
                js[head as usize] = owner;
                break;
            }
            if p == adj.len() {
                head -= 1;
            }
        }
        if found {
            for h in (0..=head as usize).rev() {
                right_match[is[h] as usize] = js[h] as u32;
            }
        }
    }
    let mut left_match = vec![None; n];
    for (r, &l) in right_match.iter().enumerate() {
        if l != NIL {
            left_match[l as usize] = Some(r);
        }
    }
    left_match
}
