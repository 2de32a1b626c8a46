use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

/// `2⁶¹ − 1`, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;
/// `2⁶² − 57`, the fallback modulus.
pub const FALLBACK_PRIME: u64 = (1 << 62) - 57;
/// `2³¹ − 1`; fits the fast 32-bit elimination kernel.
pub const MERSENNE_31: u64 = (1 << 31) - 1;
/// `2³² − 5`, the largest 32-bit prime.
pub const PRIME_32: u64 = (1 << 32) - 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^63")]
    TooLarge(u64),
    #[error("denominator divisible by {0}")]
    NonInvertible(u64),
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The field `ℤ/pℤ` for a prime `p < 2⁶³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 63 {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// `(k, c)` with `p = 2^k − c`, when `p` fits in 32 bits and `c` is small
    /// enough for the two-fold folding reduction.
    pub fn pseudo_mersenne(&self) -> Option<(u32, u64)> {
        [31u32, 32].into_iter().find_map(|k| {
            let c = (1u64 << k).checked_sub(self.p)?;
            (c < 1 << 14).then_some((k, c))
        })
    }

    pub fn is_mersenne61(&self) -> bool {
        self.p == MERSENNE_61
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.is_mersenne61() {
            mersenne_mul_add(0, a, b)
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_bigint(&self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("reduced value fits")
    }

    pub fn from_i64(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.p as i128) as u64
    }

    /// Image of `num/den`; fails when `p | den`.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<u64, FieldError> {
        let d = self.from_bigint(&den.abs());
        if d == 0 {
            return Err(FieldError::NonInvertible(self.p));
        }
        let v = self.mul(self.from_bigint(num), self.inv(d));
        Ok(if den.is_negative() { self.neg(v) } else { v })
    }

    /// `dst[k] = dst[k] + f·src[k]` for all `k`.
    pub fn axpy(&self, dst: &mut [u64], f: u64, src: &[u64]) {
        if self.is_mersenne61() {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = mersenne_mul_add(*d, f, s);
            }
        } else {
            let p = self.p as u128;
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = ((*d as u128 + f as u128 * s as u128) % p) as u64;
            }
        }
    }
}

/// `(a + f·b) mod (2⁶¹ − 1)` for reduced inputs.
#[inline(always)]
fn mersenne_mul_add(a: u64, f: u64, b: u64) -> u64 {
    let x = f as u128 * b as u128 + a as u128;
    let s = (x as u64 & MERSENNE_61) + (x >> 61) as u64;
    let s = (s & MERSENNE_61) + (s >> 61);
    if s >= MERSENNE_61 {
        s - MERSENNE_61
    } else {
        s
    }
}

/// `dst[k] = (dst[k] + f·src[k]) mod (2^k − c)` on 32-bit residues.
#[inline(always)]
fn fold_axpy(dst: &mut [u32], f: u32, src: &[u32], k: u32, c: u64) {
    let mask = (1u64 << k) - 1;
    let p = mask + 1 - c;
    for (d, &s) in dst.iter_mut().zip(src) {
        let x = *d as u64 + f as u64 * s as u64;
        let x = (x & mask) + c * (x >> k);
        let x = (x & mask) + c * (x >> k);
        *d = if x >= p { (x - p) as u32 } else { x as u32 };
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn fold_axpy_avx2(dst: &mut [u32], f: u32, src: &[u32], k: u32, c: u64) {
    fold_axpy(dst, f, src, k, c)
}

/// Vectorised when the CPU allows it; see [`PrimeField::pseudo_mersenne`].
pub(crate) fn axpy32(dst: &mut [u32], f: u32, src: &[u32], k: u32, c: u64) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: the feature was detected at runtime.
        return unsafe { fold_axpy_avx2(dst, f, src, k, c) };
    }
    fold_axpy(dst, f, src, k, c)
}
