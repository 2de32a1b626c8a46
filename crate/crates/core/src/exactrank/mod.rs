//! Exact rank computations: modular elimination for certification,
//! fraction-free elimination as a small-matrix oracle, and an optional
//! floating-point cross-check.

mod field;

pub use field::{is_prime, FieldError, PrimeField, FALLBACK_PRIME, MERSENNE_31, MERSENNE_61, PRIME_32};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structural::RatMatrix;

/// Default size cap for [`rank_rational`].
pub const DEFAULT_BAREISS_CAP: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix {rows}x{cols} exceeds the exact-elimination cap {cap}")]
    CapExceeded { rows: usize, cols: usize, cap: usize },
}

/// Rows of `m` multiplied by the lcm of their denominators.
pub fn integer_rows(m: &RatMatrix) -> Vec<Vec<(usize, BigInt)>> {
    (0..m.nrows())
        .map(|i| {
            let lcm = m.row(i).fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
            m.row(i).map(|(j, v)| (j, v.numer() * (&lcm / v.denom()))).collect()
        })
        .collect()
}

/// Dense image of `m` in `F_p` after clearing denominators row by row.
fn dense_mod_p(m: &RatMatrix, field: &PrimeField) -> Result<Vec<u64>, RankError> {
    let n = m.ncols();
    let mut a = vec![0u64; m.nrows() * n];
    for i in 0..m.nrows() {
        let lcm = m.row(i).fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        if field.from_bigint(&lcm) == 0 {
            return Err(FieldError::NonInvertible(field.modulus()).into());
        }
        for (j, v) in m.row(i) {
            a[i * n + j] = field.from_bigint(&(v.numer() * (&lcm / v.denom())));
        }
    }
    Ok(a)
}

/// Rank over `F_p` by dense Gaussian elimination.
///
/// A rank over `F_p` never exceeds the rational rank, so `rank_mod_p ==
/// min(dims)` proves full rational rank.
pub fn rank_mod_p(m: &RatMatrix, field: &PrimeField) -> Result<usize, RankError> {
    let a = dense_mod_p(m, field)?;
    Ok(match field.pseudo_mersenne() {
        Some(form) => {
            let a = a.into_iter().map(|x| x as u32).collect();
            rank_dense_mod_p32(a, m.nrows(), m.ncols(), field, form)
        }
        None => rank_dense_mod_p(a, m.nrows(), m.ncols(), field),
    })
}

/// Same elimination as [`rank_dense_mod_p`] on 32-bit residues, for
/// `p = 2^k − c`. Half the memory and a vectorisable update.
fn rank_dense_mod_p32(mut a: Vec<u32>, rows: usize, cols: usize, field: &PrimeField, (k, c): (u32, u64)) -> usize {
    let mut rank = 0;
    let mut nz: Vec<usize> = Vec::with_capacity(cols);
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if piv != rank {
            for j in col..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let prow = &mut head[rank * cols..];
        let inv = field.inv(prow[col] as u64);
        for x in &mut prow[col..] {
            *x = field.mul(*x as u64, inv) as u32;
        }
        let prow = &prow[col..];
        nz.clear();
        nz.extend((1..prow.len()).filter(|&j| prow[j] != 0));
        let sparse = nz.len() * 4 < prow.len();
        tail.par_chunks_mut(cols).for_each(|row| {
            let f = row[col];
            if f == 0 {
                return;
            }
            let g = field.neg(f as u64) as u32;
            row[col] = 0;
            let row = &mut row[col..];
            if sparse {
                for &j in &nz {
                    row[j] = field.add(row[j] as u64, field.mul(g as u64, prow[j] as u64)) as u32;
                }
            } else {
                field::axpy32(&mut row[1..], g, &prow[1..], k, c);
            }
        });
        rank += 1;
    }
    rank
}

/// Rank of a dense row-major `rows × cols` matrix over `F_p` (entries
/// reduced). Work is skipped on zero entries and sparse pivot rows, which
/// matters early on for sparse inputs.
pub fn rank_dense_mod_p(mut a: Vec<u64>, rows: usize, cols: usize, field: &PrimeField) -> usize {
    let mut rank = 0;
    let mut nz: Vec<usize> = Vec::with_capacity(cols);
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let prow = &mut head[rank * cols..];
        let inv = field.inv(prow[c]);
        for x in &mut prow[c..] {
            *x = field.mul(*x, inv);
        }
        let prow = &prow[c..];
        nz.clear();
        nz.extend((1..prow.len()).filter(|&k| prow[k] != 0));
        let sparse = nz.len() * 4 < prow.len();
        tail.par_chunks_mut(cols).for_each(|row| {
            let f = row[c];
            if f == 0 {
                return;
            }
            let g = field.neg(f);
            row[c] = 0;
            let row = &mut row[c..];
            if sparse {
                for &k in &nz {
                    row[k] = field.add(row[k], field.mul(g, prow[k]));
                }
            } else {
                field.axpy(&mut row[1..], g, &prow[1..]);
            }
        });
        rank += 1;
    }
    rank
}

/// Exact rational rank by fraction-free (Bareiss) elimination.
pub fn rank_rational(m: &RatMatrix, cap: usize) -> Result<usize, RankError> {
    if m.nrows() > cap || m.ncols() > cap {
        return Err(RankError::CapExceeded { rows: m.nrows(), cols: m.ncols(), cap });
    }
    let mut a: Vec<Vec<BigInt>> = integer_rows(m)
        .into_iter()
        .map(|row| {
            let mut dense = vec![BigInt::zero(); m.ncols()];
            for (j, v) in row {
                dense[j] = v;
            }
            dense
        })
        .collect();
    Ok(bareiss_rank(&mut a))
}

/// Rank of an integer matrix by Bareiss elimination (destroys `a`).
pub fn bareiss_rank(a: &mut [Vec<BigInt>]) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        let (head, tail) = a.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            for j in c + 1..cols {
                let v = &row[j] * &prow[c] - &row[c] * &prow[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = prow[c].clone();
        rank += 1;
    }
    rank
}

/// Numerical rank by LU with partial pivoting in `f64`; entries below
/// `tol · max|a|` count as zero. Not a proof of anything.
pub fn rank_float(m: &RatMatrix, tol: f64) -> usize {
    use num_traits::ToPrimitive;
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = vec![0f64; rows * cols];
    for (i, j, v) in m.entries() {
        a[i * cols + j] = v.to_f64().unwrap_or(f64::NAN);
    }
    let scale = a.iter().fold(0f64, |s, x| s.max(x.abs()));
    let eps = tol * scale.max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, best) = (rank..rows)
            .map(|r| (r, a[r * cols + c].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= eps {
            continue;
        }
        for j in 0..cols {
            a.swap(piv * cols + j, rank * cols + j);
        }
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let prow = &head[rank * cols..];
        tail.par_chunks_mut(cols).for_each(|row| {
            let f = row[c] / prow[c];
            if f != 0.0 {
                for j in c..cols {
                    row[j] -= f * prow[j];
                }
            }
        });
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    ModP,
    FractionFree,
    FloatingLu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    CertifiedFullRank,
    CertifiedLowerBound,
    NumericOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub nrows: usize,
    pub ncols: usize,
    pub method: RankMethod,
    pub primes: Vec<u64>,
    /// Best exact lower bound on the rational rank.
    pub rank: usize,
    pub conclusion: Conclusion,
    /// Rank seen by the floating-point cross-check, if run.
    pub float_rank: Option<usize>,
}

impl RankCertificate {
    pub fn is_full_rank(&self) -> bool {
        self.conclusion == Conclusion::CertifiedFullRank
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Primes tried in order until full rank is seen.
    pub primes: Vec<u64>,
    /// Matrices within this size also get an exact rational rank.
    pub bareiss_cap: usize,
    pub float_check: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { primes: vec![MERSENNE_31, PRIME_32], bareiss_cap: DEFAULT_BAREISS_CAP, float_check: false }
    }
}

/// Tries to prove that `m` has rank `min(dims)`.
///
/// Each prime gives a lower bound on the rational rank; reaching
/// `min(dims)` certifies full rank. Otherwise, small matrices get the exact
/// rank from fraction-free elimination, and the rest keep the best bound.
pub fn certify_full_rank(m: &RatMatrix, opts: &CertifyOptions) -> RankCertificate {
    let full = m.nrows().min(m.ncols());
    let mut cert = RankCertificate {
        nrows: m.nrows(),
        ncols: m.ncols(),
        method: RankMethod::ModP,
        primes: Vec::new(),
        rank: 0,
        conclusion: Conclusion::CertifiedLowerBound,
        float_rank: None,
    };
    for &p in &opts.primes {
        let Ok(field) = PrimeField::new(p) else { continue };
        let Ok(r) = rank_mod_p(m, &field) else { continue };
        cert.primes.push(p);
        cert.rank = cert.rank.max(r);
        if r == full {
            break;
        }
    }
    if cert.rank < full {
        if let Ok(r) = rank_rational(m, opts.bareiss_cap) {
            cert.method = RankMethod::FractionFree;
            cert.rank = r;
        }
    }
    if opts.float_check {
        cert.float_rank = Some(rank_float(m, 1e-10));
    }
    if cert.rank == full {
        cert.conclusion = Conclusion::CertifiedFullRank;
    } else if cert.primes.is_empty() && cert.method == RankMethod::ModP {
        cert.method = RankMethod::FloatingLu;
        cert.conclusion = Conclusion::NumericOnly;
        cert.rank = cert.float_rank.unwrap_or(0);
    }
    cert
}

/// Whether a rational number is an integer.
pub fn is_integral(r: &crate::polyring::Rational) -> bool {
    r.denom().abs().is_one()
}
