//! `.polymtx` text format.
//!
//! ```text
//! rows cols nnz
//! row col <jet polynomial>        (1-based, one line per entry)
//! %%rows
//! row base_eq a0 a1 a2 a3
//! %%cols
//! col unknown a0 a1 a2 a3
//! %%rhs
//! row unknown a0 a1 a2 a3 <jet polynomial>
//! ```

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::combinatorics::MultiIndex;
use crate::pdesystem::{Term, UnknownId};

use super::{ColId, JetPoly, PolyMatrix, RowId};

#[derive(Debug, Error)]
pub enum PolymtxError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn unknown_from_name(name: &str) -> Option<UnknownId> {
    use UnknownId::*;
    [Z1, Z2, Pi, Phi1, Phi2, Phi3, Phi4].into_iter().find(|u| u.name() == name)
}

fn write_index(out: &mut impl Write, a: &MultiIndex) -> io::Result<()> {
    write!(out, "{} {} {} {}", a.0[0], a.0[1], a.0[2], a.0[3])
}

pub fn write_polymtx(m: &PolyMatrix, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.entries() {
        writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
    }
    writeln!(out, "%%rows")?;
    for (i, r) in m.row_ids().iter().enumerate() {
        write!(out, "{} {} ", i + 1, r.base_eq)?;
        write_index(out, &r.applied)?;
        writeln!(out)?;
    }
    writeln!(out, "%%cols")?;
    for (j, c) in m.col_ids().iter().enumerate() {
        write!(out, "{} {} ", j + 1, c.unknown.name())?;
        write_index(out, &c.deriv)?;
        writeln!(out)?;
    }
    writeln!(out, "%%rhs")?;
    for e in m.rhs() {
        write!(out, "{} {} ", e.row + 1, e.term.unknown.name())?;
        write_index(out, &e.term.deriv)?;
        writeln!(out, " {}", e.coef)?;
    }
    Ok(())
}

pub fn to_polymtx_string(m: &PolyMatrix) -> String {
    let mut buf = Vec::new();
    write_polymtx(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<Option<String>, PolymtxError> {
        self.line += 1;
        Ok(self.inner.next().transpose()?)
    }

    fn err(&self, message: impl Into<String>) -> PolymtxError {
        PolymtxError::Parse { line: self.line, message: message.into() }
    }
}

fn split_fields(text: &str, k: usize) -> Option<(Vec<&str>, &str)> {
    let mut rest = text.trim_start();
    let mut fields = Vec::with_capacity(k);
    for _ in 0..k {
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if end == 0 {
            return None;
        }
        fields.push(&rest[..end]);
        rest = rest[end..].trim_start();
    }
    Some((fields, rest))
}

fn parse_index(fields: &[&str]) -> Option<MultiIndex> {
    let mut a = [0u16; 4];
    for (slot, f) in fields.iter().enumerate() {
        a[slot] = f.parse().ok()?;
    }
    Some(MultiIndex(a))
}

pub fn read_polymtx(input: impl BufRead) -> Result<PolyMatrix, PolymtxError> {
    let mut lines = Lines { inner: input.lines(), line: 0 };
    let header = lines.next()?.ok_or_else(|| lines.err("empty input"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| lines.err("bad header"))?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(lines.err("header must be `rows cols nnz`"));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let text = lines.next()?.ok_or_else(|| lines.err("missing entry"))?;
        let (f, rest) = split_fields(&text, 2).ok_or_else(|| lines.err("bad entry"))?;
        let i: usize = f[0].parse().map_err(|_| lines.err("bad row"))?;
        let j: usize = f[1].parse().map_err(|_| lines.err("bad column"))?;
        if i == 0 || i > nrows || j == 0 || j > ncols {
            return Err(lines.err("entry out of range"));
        }
        let v: JetPoly = rest.parse().map_err(|e| lines.err(format!("{e}")))?;
        triplets.push((i - 1, (j - 1) as u32, v));
    }
    let expect_section = |lines: &mut Lines<_>, name: &str| -> Result<(), PolymtxError> {
        match lines.next()? {
            Some(l) if l.trim() == name => Ok(()),
            _ => Err(lines.err(format!("expected {name}"))),
        }
    };
    expect_section(&mut lines, "%%rows")?;
    let mut rows = Vec::with_capacity(nrows);
    for _ in 0..nrows {
        let text = lines.next()?.ok_or_else(|| lines.err("missing row label"))?;
        let (f, _) = split_fields(&text, 6).ok_or_else(|| lines.err("bad row label"))?;
        let base_eq: u8 = f[1].parse().map_err(|_| lines.err("bad equation"))?;
        let applied = parse_index(&f[2..]).ok_or_else(|| lines.err("bad multi-index"))?;
        rows.push(RowId { base_eq, applied });
    }
    expect_section(&mut lines, "%%cols")?;
    let mut cols = Vec::with_capacity(ncols);
    for _ in 0..ncols {
        let text = lines.next()?.ok_or_else(|| lines.err("missing column label"))?;
        let (f, _) = split_fields(&text, 6).ok_or_else(|| lines.err("bad column label"))?;
        let unknown = unknown_from_name(f[1]).ok_or_else(|| lines.err("bad unknown"))?;
        let deriv = parse_index(&f[2..]).ok_or_else(|| lines.err("bad multi-index"))?;
        cols.push(ColId { unknown, deriv });
    }
    expect_section(&mut lines, "%%rhs")?;
    let mut rhs: Vec<Vec<(Term, JetPoly)>> = vec![Vec::new(); nrows];
    while let Some(text) = lines.next()? {
        if text.trim().is_empty() {
            continue;
        }
        let (f, rest) = split_fields(&text, 6).ok_or_else(|| lines.err("bad rhs entry"))?;
        let i: usize = f[0].parse().map_err(|_| lines.err("bad row"))?;
        if i == 0 || i > nrows {
            return Err(lines.err("rhs row out of range"));
        }
        let unknown = unknown_from_name(f[1]).ok_or_else(|| lines.err("bad unknown"))?;
        let deriv = parse_index(&f[2..]).ok_or_else(|| lines.err("bad multi-index"))?;
        let v: JetPoly = rest.parse().map_err(|e| lines.err(format!("{e}")))?;
        rhs[i - 1].push((Term::new(unknown, deriv), v));
    }

    let mut per_row: Vec<Vec<(u32, JetPoly)>> = vec![Vec::new(); nrows];
    for (i, j, v) in triplets {
        per_row[i].push((j, v));
    }
    let mut m = PolyMatrix::new(cols);
    for ((id, mut entries), r) in rows.into_iter().zip(per_row).zip(rhs) {
        entries.sort_by_key(|e| e.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) || entries.iter().any(|e| e.1.is_empty()) {
            return Err(PolymtxError::Parse { line: 0, message: "duplicate or zero entry".into() });
        }
        m.push_row(id, entries, r);
    }
    Ok(m)
}
