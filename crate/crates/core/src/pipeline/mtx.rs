//! Matrix Market and exact-triplet serialization of evaluated matrices,
//! plus content hashing.

use std::io::{self, BufRead, Write};

use num_traits::ToPrimitive;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::polyring::format_rational;
use crate::structural::RatMatrix;

#[derive(Debug, Error)]
pub enum MtxError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Writes `m` as a coordinate `real general` Matrix Market file. Values are
/// the nearest doubles; use [`write_exact`] when exactness matters.
pub fn write_matrix_market(m: &RatMatrix, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "% values rounded to double precision")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.entries() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v.to_f64().unwrap_or(f64::NAN))?;
    }
    Ok(())
}

/// Exact listing: header `rows cols nnz`, then `i j num/den` (1-based).
/// This is the canonical form that content hashes are taken over.
pub fn write_exact(m: &RatMatrix, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.entries() {
        writeln!(out, "{} {} {}", i + 1, j + 1, format_rational(v))?;
    }
    Ok(())
}

/// JSON object `{"rows", "cols", "entries": [[i, j, "num/den"], ...]}`
/// with 1-based indices.
pub fn write_json(m: &RatMatrix, out: &mut impl Write) -> io::Result<()> {
    let entries: Vec<(usize, usize, String)> = m.entries().map(|(i, j, v)| (i + 1, j + 1, format_rational(v))).collect();
    let doc = serde_json::json!({ "rows": m.nrows(), "cols": m.ncols(), "entries": entries });
    serde_json::to_writer(&mut *out, &doc)?;
    writeln!(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MtxData {
    pub nrows: usize,
    pub ncols: usize,
    /// 0-based `(row, col, value)`; pattern files get value 1.
    pub entries: Vec<(usize, usize, f64)>,
}

/// Reads coordinate `real`, `integer` or `pattern` files with `general`
/// symmetry.
pub fn read_matrix_market(input: impl BufRead) -> Result<MtxData, MtxError> {
    let mut lines = input.lines().enumerate();
    let err = |line: usize, message: &str| MtxError::Parse { line: line + 1, message: message.to_string() };
    let (n0, banner) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let banner = banner?.to_ascii_lowercase();
    let words: Vec<&str> = banner.split_whitespace().collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" || words[2] != "coordinate" {
        return Err(err(n0, "expected a coordinate Matrix Market banner"));
    }
    let pattern = match words[3] {
        "real" | "integer" => false,
        "pattern" => true,
        _ => return Err(err(n0, "unsupported field")),
    };
    if words[4] != "general" {
        return Err(err(n0, "only general symmetry is supported"));
    }
    let mut header = None;
    let mut entries = Vec::new();
    for (n, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |k: usize| -> Result<usize, MtxError> {
            fields.get(k).and_then(|f| f.parse().ok()).ok_or_else(|| err(n, "bad integer"))
        };
        match header {
            None => header = Some((num(0)?, num(1)?, num(2)?)),
            Some((rows, cols, _)) => {
                let (i, j) = (num(0)?, num(1)?);
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(err(n, "index out of range"));
                }
                let v = if pattern {
                    1.0
                } else {
                    fields.get(2).and_then(|f| f.parse().ok()).ok_or_else(|| err(n, "bad value"))?
                };
                entries.push((i - 1, j - 1, v));
            }
        }
    }
    let (nrows, ncols, nnz) = header.ok_or_else(|| err(0, "missing size line"))?;
    if entries.len() != nnz {
        return Err(err(0, &format!("expected {nnz} entries, found {}", entries.len())));
    }
    Ok(MtxData { nrows, ncols, entries })
}

struct HashWriter(Sha256);

impl Write for HashWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// SHA-256 (lower-case hex) of whatever `emit` writes.
pub fn sha256_of(emit: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> String {
    let mut w = io::BufWriter::with_capacity(1 << 16, HashWriter(Sha256::new()));
    emit(&mut w).expect("hashing never fails");
    let inner = w.into_inner().ok().expect("flush to hasher");
    inner.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
