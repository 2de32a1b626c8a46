//! Multi-indices over the four independent variables `(t, x1, x2, x3)` and
//! the counting functions that size every matrix of the prolonged system.
//!
//! The within-degree enumeration order is the one used when listing
//! derivatives by hand: `∂1, ∂2, ∂3, ∂t`, then `∂11, ∂12, ∂13, ∂1t, ∂22, …,
//! ∂tt`. Equivalently, multi-indices of equal degree are sorted in
//! descending lexicographic order of `(a1, a2, a3, a0)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("integer overflow while counting at n = {0}")]
    Overflow(u64),
    #[error("multi-index of degree {degree} exceeds the level bound {bound}")]
    DegreeExceeded { degree: u32, bound: u32 },
}

/// One of the four independent variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    T,
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::T, Axis::X1, Axis::X2, Axis::X3];
    pub const SPACE: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    /// Slot of this axis inside a [`MultiIndex`].
    pub fn slot(self) -> usize {
        match self {
            Axis::T => 0,
            Axis::X1 => 1,
            Axis::X2 => 2,
            Axis::X3 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::T => "t",
            Axis::X1 => "1",
            Axis::X2 => "2",
            Axis::X3 => "3",
        }
    }
}

/// Orders of differentiation `(a0, a1, a2, a3)` with respect to
/// `(t, x1, x2, x3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct MultiIndex(pub [u16; 4]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; 4]);

    pub fn new(a0: u16, a1: u16, a2: u16, a3: u16) -> Self {
        MultiIndex([a0, a1, a2, a3])
    }

    /// Unit multi-index along `axis`.
    pub fn unit(axis: Axis) -> Self {
        let mut a = [0; 4];
        a[axis.slot()] = 1;
        MultiIndex(a)
    }

    /// Builds a multi-index from a list of axes, e.g. `[X1, X3, X3]`.
    pub fn from_axes(axes: &[Axis]) -> Self {
        axes.iter().fold(Self::ZERO, |acc, &a| acc.bump(a))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&a| a as u32).sum()
    }

    pub fn get(&self, axis: Axis) -> u16 {
        self.0[axis.slot()]
    }

    pub fn bump(mut self, axis: Axis) -> Self {
        self.0[axis.slot()] += 1;
        self
    }

    pub fn decrement(mut self, axis: Axis) -> Option<Self> {
        let slot = &mut self.0[axis.slot()];
        if *slot == 0 {
            return None;
        }
        *slot -= 1;
        Some(self)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(other.0) {
            *x += y;
        }
        MultiIndex(a)
    }

    /// Componentwise `self - other`, if non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(other.0) {
            *x = x.checked_sub(y)?;
        }
        Some(MultiIndex(a))
    }

    /// Spatial part `(0, a1, a2, a3)`.
    pub fn spatial(&self) -> MultiIndex {
        MultiIndex([0, self.0[1], self.0[2], self.0[3]])
    }
}

impl fmt::Display for MultiIndex {
    /// Renders as `d[t^a0 x1^a1 x2^a2 x3^a3]`, omitting zero orders; the
    /// zero multi-index renders as `id`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::ZERO {
            return write!(f, "id");
        }
        let names = ["t", "x1", "x2", "x3"];
        let mut parts = Vec::new();
        for (name, &a) in names.iter().zip(&self.0) {
            match a {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{a}")),
            }
        }
        write!(f, "d[{}]", parts.join(" "))
    }
}

fn checked_product(n: u64, offsets: &[u64], divisor: u128) -> Result<u64, CombinatoricsError> {
    let mut acc: u128 = 1;
    for &k in offsets {
        acc = acc
            .checked_mul(n as u128 + k as u128)
            .ok_or(CombinatoricsError::Overflow(n))?;
    }
    u64::try_from(acc / divisor).map_err(|_| CombinatoricsError::Overflow(n))
}

/// Number of multi-indices of exact degree `n`: `(n+1)(n+2)(n+3)/6`.
pub fn count_e(n: u64) -> Result<u64, CombinatoricsError> {
    checked_product(n, &[1, 2, 3], 6)
}

/// Number of multi-indices of degree at most `n`: `(n+1)(n+2)(n+3)(n+4)/24`.
pub fn count_f(n: u64) -> Result<u64, CombinatoricsError> {
    checked_product(n, &[1, 2, 3, 4], 24)
}

/// Equations produced by prolonging the first two equations to level `n`
/// and the divergence equation to level `n + 2`: `2F(n) + F(n+2)`.
pub fn count_g(n: u64) -> Result<u64, CombinatoricsError> {
    let n2 = n.checked_add(2).ok_or(CombinatoricsError::Overflow(n))?;
    let a = count_f(n)?;
    let b = count_f(n2)?;
    a.checked_mul(2)
        .and_then(|x| x.checked_add(b))
        .ok_or(CombinatoricsError::Overflow(n))
}

/// Unknowns (derivatives of `z1`, `z2` up to order `n + 3`): `2F(n+3)`.
pub fn count_h(n: u64) -> Result<u64, CombinatoricsError> {
    let n3 = n.checked_add(3).ok_or(CombinatoricsError::Overflow(n))?;
    count_f(n3)?
        .checked_mul(2)
        .ok_or(CombinatoricsError::Overflow(n))
}

/// `F(n)` for small arguments where overflow is impossible; `F(-1) = 0`.
fn f_small(n: i64) -> usize {
    if n < 0 {
        0
    } else {
        let n = n as usize;
        (n + 1) * (n + 2) * (n + 3) * (n + 4) / 24
    }
}

/// Maps `α` with `|α| ≤ n` to a 4-subset of `{1, …, n+4}`.
pub fn subset_encode(alpha: &MultiIndex, n: u32) -> Result<[u32; 4], CombinatoricsError> {
    let degree = alpha.degree();
    if degree > n {
        return Err(CombinatoricsError::DegreeExceeded { degree, bound: n });
    }
    let [a0, a1, a2, a3] = alpha.0.map(|a| a as u32);
    Ok([a0 + 1, a0 + a1 + 2, a0 + a1 + a2 + 3, a0 + a1 + a2 + a3 + 4])
}

/// Position of `alpha` in the graded enumeration of `ℕ⁴` (0-based).
///
/// All multi-indices of degree `m` precede those of degree `m + 1`, so the
/// indices of degree `≤ n` occupy exactly `0..F(n)`.
pub fn index_of(alpha: &MultiIndex) -> usize {
    let d = alpha.degree() as usize;
    let [_, a1, a2, a3] = alpha.0.map(|a| a as usize);
    // multi-indices of degree d with a larger x1 order
    let mut rank: usize = ((a1 + 1)..=d).map(|b1| (d - b1 + 2) * (d - b1 + 1) / 2).sum();
    let rem = d - a1;
    rank += ((a2 + 1)..=rem).map(|b2| rem - b2 + 1).sum::<usize>();
    let rem2 = rem - a2;
    rank += rem2 - a3;
    f_small(d as i64 - 1) + rank
}

/// Inverse of [`index_of`].
pub fn multiindex_of(k: usize) -> MultiIndex {
    let mut d = 0usize;
    while f_small(d as i64) <= k {
        d += 1;
    }
    let mut rank = k - f_small(d as i64 - 1);
    let mut a1 = d;
    loop {
        let block = (d - a1 + 2) * (d - a1 + 1) / 2;
        if rank < block {
            break;
        }
        rank -= block;
        a1 -= 1;
    }
    let rem = d - a1;
    let mut a2 = rem;
    loop {
        let block = rem - a2 + 1;
        if rank < block {
            break;
        }
        rank -= block;
        a2 -= 1;
    }
    let rem2 = rem - a2;
    let a3 = rem2 - rank;
    let a0 = rem2 - a3;
    MultiIndex([a0 as u16, a1 as u16, a2 as u16, a3 as u16])
}

/// All multi-indices of exact degree `m`, in enumeration order.
pub fn multiindices_of_degree(m: u32) -> Vec<MultiIndex> {
    let start = f_small(m as i64 - 1);
    let end = f_small(m as i64);
    (start..end).map(multiindex_of).collect()
}

/// All multi-indices of degree at most `n`, in enumeration order.
pub fn multiindices_up_to(n: u32) -> Vec<MultiIndex> {
    (0..f_small(n as i64)).map(multiindex_of).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn brute_force(n: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for a0 in 0..=n {
            for a1 in 0..=n - a0 {
                for a2 in 0..=n - a0 - a1 {
                    for a3 in 0..=n - a0 - a1 - a2 {
                        out.push(MultiIndex::new(a0 as u16, a1 as u16, a2 as u16, a3 as u16));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_e(0).unwrap(), 1);
        assert_eq!(count_f(0).unwrap(), 1);
        let exact19 = brute_force(19).iter().filter(|a| a.degree() == 19).count();
        assert_eq!(exact19, 1540);
        assert_eq!(count_e(19).unwrap(), 1540);
    }

    #[test]
    fn e_is_difference_of_f() {
        for n in 1..=30 {
            assert_eq!(count_e(n).unwrap(), count_f(n).unwrap() - count_f(n - 1).unwrap());
        }
        for n in 0..=30u64 {
            let sum: u64 = (0..=n).map(|m| count_e(m).unwrap()).sum();
            assert_eq!(sum, count_f(n).unwrap());
        }
    }

    #[test]
    fn f_matches_enumeration() {
        for n in 0..=12 {
            assert_eq!(brute_force(n).len() as u64, count_f(n as u64).unwrap());
        }
    }

    #[test]
    fn prolonged_system_dimensions() {
        assert_eq!(count_f(19).unwrap(), 8855);
        assert_eq!(count_f(22).unwrap(), 14950);
        assert_eq!(count_g(19).unwrap(), 30360);
        assert_eq!(count_h(19).unwrap(), 29900);
        assert_eq!(count_g(15).unwrap(), 13737);
        assert_eq!(count_h(15).unwrap(), 14630);
        assert_eq!(count_g(18).unwrap() as i64 - count_h(18).unwrap() as i64, -44);
        assert_eq!(count_g(19).unwrap() as i64 - count_h(19).unwrap() as i64, 460);
    }

    #[test]
    fn closed_forms_of_g_and_h() {
        for n in 0..=40u64 {
            let h = (n + 4) * (n + 5) * (n + 6) * (n + 7) / 12;
            let g = (3 + n) * (4 + n) * (34 + 17 * n + 3 * n * n) / 24;
            assert_eq!(count_h(n).unwrap(), h);
            assert_eq!(count_g(n).unwrap(), g);
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(count_f(u64::MAX / 2), Err(CombinatoricsError::Overflow(_))));
        assert!(count_g(u64::MAX).is_err());
    }

    #[test]
    fn subset_examples() {
        assert_eq!(subset_encode(&MultiIndex::ZERO, 0).unwrap(), [1, 2, 3, 4]);
        assert_eq!(subset_encode(&MultiIndex::new(1, 0, 0, 0), 1).unwrap(), [2, 3, 4, 5]);
        assert_eq!(
            subset_encode(&MultiIndex::new(1, 0, 0, 0), 0),
            Err(CombinatoricsError::DegreeExceeded { degree: 1, bound: 0 })
        );
    }

    #[test]
    fn subset_encoding_is_a_bijection() {
        for n in 0..=8u32 {
            let all = brute_force(n);
            let images: HashSet<[u32; 4]> =
                all.iter().map(|a| subset_encode(a, n).unwrap()).collect();
            assert_eq!(images.len(), all.len());
            for s in &images {
                assert!(s.windows(2).all(|w| w[0] < w[1]));
                assert!(s[0] >= 1 && s[3] <= n + 4);
            }
            // C(n+4, 4)
            let m = (n + 4) as u64;
            assert_eq!(images.len() as u64, m * (m - 1) * (m - 2) * (m - 3) / 24);
        }
        let six: HashSet<_> = brute_force(6).iter().map(|a| subset_encode(a, 6).unwrap()).collect();
        let mut expected = HashSet::new();
        for a in 1..=10u32 {
            for b in a + 1..=10 {
                for c in b + 1..=10 {
                    for d in c + 1..=10 {
                        expected.insert([a, b, c, d]);
                    }
                }
            }
        }
        assert_eq!(six, expected);
    }

    #[test]
    fn enumeration_order_matches_hand_listing() {
        use Axis::*;
        assert_eq!(index_of(&MultiIndex::ZERO), 0);
        let deg1: Vec<_> = [X1, X2, X3, T].iter().map(|&a| MultiIndex::unit(a)).collect();
        assert_eq!(multiindices_of_degree(1), deg1);
        // 1-based positions F(0)+1 = 2 to F(1) = 5
        for (i, a) in deg1.iter().enumerate() {
            assert_eq!(index_of(a) + 1, 2 + i);
        }
        let deg2: Vec<_> = [
            [X1, X1],
            [X1, X2],
            [X1, X3],
            [X1, T],
            [X2, X2],
            [X2, X3],
            [X2, T],
            [X3, X3],
            [X3, T],
            [T, T],
        ]
        .iter()
        .map(|axes| MultiIndex::from_axes(axes))
        .collect();
        assert_eq!(multiindices_of_degree(2), deg2);
        assert_eq!(index_of(&deg2[0]) + 1, 6);
        assert_eq!(index_of(&deg2[9]) + 1, 15);
    }

    #[test]
    fn index_round_trip() {
        for k in 0..20000 {
            assert_eq!(index_of(&multiindex_of(k)), k);
        }
    }

    #[test]
    fn index_is_graded_bijection() {
        for n in 0..=12u32 {
            let mut seen: Vec<usize> = brute_force(n).iter().map(index_of).collect();
            seen.sort_unstable();
            let expected: Vec<usize> = (0..count_f(n as u64).unwrap() as usize).collect();
            assert_eq!(seen, expected);
        }
    }
}
