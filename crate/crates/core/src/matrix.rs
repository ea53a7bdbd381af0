//! Zero-diagonal matrix predicates, (0,2)-masks and T0 enumeration.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::braid::{PairCountMatrix, StrandCount, MAX_STRANDS};
use crate::par::{self, Exec};

/// Largest `n` accepted by [`enumerate_t0`] and [`count_t0`].
pub const MAX_ENUM_STRANDS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix has a non-zero diagonal entry at ({0},{0})")]
    NonZeroDiagonal(usize),
    #[error("enumeration supports n <= {MAX_ENUM_STRANDS}, got {0}")]
    StrandCountTooLarge(usize),
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
    #[error("matrix has a negative entry at ({0},{1})")]
    Negative(usize, usize),
    #[error("matrix has an odd entry at ({0},{1})")]
    Odd(usize, usize),
    #[error("pair {0}-{1} out of range for {2} strands")]
    PairOutOfRange(usize, usize, usize),
    #[error("cannot parse pair list: {0}")]
    Parse(String),
}

/// A triple `i < j < k` with `M(i,j) = M(j,k) = 0` but `M(i,k) != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct T0Violation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl fmt::Display for T0Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({i},{j}) = M({j},{k}) = 0 but M({i},{k}) != 0", i = self.i, j = self.j, k = self.k)
    }
}

/// First T0 violation of `m` (read through its symmetric closure), if any.
pub fn t0_violation(m: &PairCountMatrix) -> Result<Option<T0Violation>, MatrixError> {
    let n = m.n().get();
    if let Some(i) = (1..=n).find(|&i| m.get(i, i) != 0) {
        return Err(MatrixError::NonZeroDiagonal(i));
    }
    let nz = |a: usize, b: usize| m.get(a, b) != 0 || m.get(b, a) != 0;
    for i in 1..=n {
        for k in i + 2..=n {
            if !nz(i, k) {
                continue;
            }
            if let Some(j) = (i + 1..k).find(|&j| !nz(i, j) && !nz(j, k)) {
                return Ok(Some(T0Violation { i, j, k }));
            }
        }
    }
    Ok(None)
}

pub fn is_t0(m: &PairCountMatrix) -> Result<bool, MatrixError> {
    t0_violation(m).map(|v| v.is_none())
}

/// Checks the CN-target shape: zero diagonal, symmetric, non-negative, even.
pub fn check_sym_even(m: &PairCountMatrix) -> Result<(), MatrixError> {
    let n = m.n().get();
    for i in 1..=n {
        if m.get(i, i) != 0 {
            return Err(MatrixError::NonZeroDiagonal(i));
        }
        for j in 1..=n {
            let v = m.get(i, j);
            if v < 0 {
                return Err(MatrixError::Negative(i, j));
            }
            if v != m.get(j, i) {
                return Err(MatrixError::NotSymmetric(i, j));
            }
            if v % 2 != 0 {
                return Err(MatrixError::Odd(i, j));
            }
        }
    }
    Ok(())
}

/// Matrix with rows and columns in reversed order.
pub fn reverse_matrix(m: &PairCountMatrix) -> PairCountMatrix {
    let n = m.n().get();
    let mut r = PairCountMatrix::zero(m.n());
    for i in 1..=n {
        for j in 1..=n {
            r.set(n + 1 - i, n + 1 - j, m.get(i, j));
        }
    }
    r
}

/// Bit index of pair `(i, j)`, `1 <= i < j <= n`, in lexicographic pair order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * (2 * n - i) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A (0,2)-matrix stored as a bitset over the upper-triangular pairs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpperMask {
    n: u8,
    bits: u128,
}

impl UpperMask {
    pub fn empty(n: StrandCount) -> Self {
        UpperMask { n: n.get() as u8, bits: 0 }
    }

    pub fn from_bits(n: StrandCount, bits: u128) -> Self {
        let width = pair_count(n.get());
        let valid = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        UpperMask { n: n.get() as u8, bits: bits & valid }
    }

    pub fn from_pairs(n: StrandCount, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, MatrixError> {
        let mut m = UpperMask::empty(n);
        for (a, b) in pairs {
            let (i, j) = (a.min(b), a.max(b));
            if i == 0 || i == j || j > n.get() {
                return Err(MatrixError::PairOutOfRange(a, b, n.get()));
            }
            m.insert(i, j);
        }
        Ok(m)
    }

    pub fn n(&self) -> StrandCount {
        StrandCount::new(self.n as usize).expect("mask size is always valid")
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        i != j && self.bits >> pair_index(self.size(), i, j) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize, j: usize) {
        let (i, j) = (i.min(j), i.max(j));
        self.bits |= 1u128 << pair_index(self.size(), i, j);
    }

    #[inline]
    pub fn remove(&mut self, i: usize, j: usize) {
        let (i, j) = (i.min(j), i.max(j));
        self.bits &= !(1u128 << pair_index(self.size(), i, j));
    }

    pub fn with(mut self, i: usize, j: usize) -> Self {
        self.insert(i, j);
        self
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Set pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.size();
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j))).filter(move |&(i, j)| self.contains(i, j))
    }

    pub fn is_subset_of(&self, other: &UpperMask) -> bool {
        self.n == other.n && self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &UpperMask) -> UpperMask {
        assert_eq!(self.n, other.n);
        UpperMask { n: self.n, bits: self.bits | other.bits }
    }

    pub fn minus(&self, other: &UpperMask) -> UpperMask {
        assert_eq!(self.n, other.n);
        UpperMask { n: self.n, bits: self.bits & !other.bits }
    }

    pub fn intersects(&self, other: &UpperMask) -> bool {
        self.bits & other.bits != 0
    }

    /// Neighbour sets: bit `b` of `adj[a]` is set iff pair `{a, b}` is set (1-based).
    fn adjacency(&self) -> [u32; MAX_STRANDS as usize + 1] {
        let mut adj = [0u32; MAX_STRANDS as usize + 1];
        for (i, j) in self.pairs() {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    pub fn t0_violation(&self) -> Option<T0Violation> {
        let adj = self.adjacency();
        for (i, k) in self.pairs() {
            if k == i + 1 {
                continue;
            }
            let between = ((1u32 << k) - 1) & !((1u32 << (i + 1)) - 1);
            let missing = between & !(adj[i] | adj[k]);
            if missing != 0 {
                return Some(T0Violation { i, j: missing.trailing_zeros() as usize, k });
            }
        }
        None
    }

    pub fn is_t0(&self) -> bool {
        self.t0_violation().is_none()
    }

    /// Full symmetric matrix with 2 on every set pair.
    pub fn to_matrix(&self) -> PairCountMatrix {
        let mut m = PairCountMatrix::zero(self.n());
        for (i, j) in self.pairs() {
            m.set(i, j, 2);
            m.set(j, i, 2);
        }
        m
    }

    pub fn reverse(&self) -> UpperMask {
        let n = self.size();
        let mut r = UpperMask { n: self.n, bits: 0 };
        for (i, j) in self.pairs() {
            r.insert(n + 1 - j, n + 1 - i);
        }
        r
    }

    /// Largest `j - i` over the set pairs (0 for the empty mask).
    pub fn bandwidth(&self) -> usize {
        self.pairs().map(|(i, j)| j - i).max().unwrap_or(0)
    }

    /// Smallest index window `(first, last)` containing every set pair.
    pub fn support_window(&self) -> Option<(usize, usize)> {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for (i, j) in self.pairs() {
            lo = lo.min(i);
            hi = hi.max(j);
        }
        (hi > 0).then_some((lo, hi))
    }

    /// The pairs lying inside `first..=last`.
    pub fn restrict(&self, first: usize, last: usize) -> UpperMask {
        let mut r = UpperMask { n: self.n, bits: 0 };
        for (i, j) in self.pairs().filter(|&(i, j)| i >= first && j <= last) {
            r.insert(i, j);
        }
        r
    }

    /// Re-indexes the window `offset..offset+size-1` as a standalone `size`-mask.
    pub fn shrink(&self, offset: usize, size: StrandCount) -> UpperMask {
        let mut r = UpperMask::empty(size);
        for (i, j) in self.pairs() {
            debug_assert!(i >= offset && j < offset + size.get());
            r.insert(i + 1 - offset, j + 1 - offset);
        }
        r
    }

    /// Inverse of [`shrink`](Self::shrink): places this mask at `offset` in `n` strands.
    pub fn widen(&self, n: StrandCount, offset: usize) -> UpperMask {
        let mut r = UpperMask::empty(n);
        for (i, j) in self.pairs() {
            r.insert(i + offset - 1, j + offset - 1);
        }
        r
    }

    /// Pair-list text form, e.g. `1-2,1-3,2-3`.
    pub fn to_pair_list(&self) -> String {
        self.pairs().map(|(i, j)| format!("{i}-{j}")).collect::<Vec<_>>().join(",")
    }

    pub fn parse_pair_list(n: StrandCount, text: &str) -> Result<UpperMask, MatrixError> {
        let pairs = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (a, b) = t.split_once('-').ok_or_else(|| MatrixError::Parse(t.to_string()))?;
                let a = a.trim().parse().map_err(|_| MatrixError::Parse(t.to_string()))?;
                let b = b.trim().parse().map_err(|_| MatrixError::Parse(t.to_string()))?;
                Ok((a, b))
            })
            .collect::<Result<Vec<(usize, usize)>, MatrixError>>()?;
        UpperMask::from_pairs(n, pairs)
    }
}

impl fmt::Debug for UpperMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UpperMask(n={}, {{{}}})", self.n, self.to_pair_list())
    }
}

impl fmt::Display for UpperMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pair_list())
    }
}

impl FromStr for UpperMask {
    type Err = MatrixError;
    /// Accepts `n:pairs`, e.g. `4:1-2,3-4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, pairs) = s.split_once(':').ok_or_else(|| MatrixError::Parse(s.to_string()))?;
        let n: StrandCount = n.parse().map_err(|_| MatrixError::Parse(s.to_string()))?;
        UpperMask::parse_pair_list(n, pairs)
    }
}

/// The (0,2)-support of a non-negative even symmetric matrix: every non-zero
/// entry becomes 2.
pub fn m02(m: &PairCountMatrix) -> UpperMask {
    let mut mask = UpperMask::empty(m.n());
    for (i, j) in m.upper_pairs().collect::<Vec<_>>() {
        if m.get(i, j) != 0 || m.get(j, i) != 0 {
            mask.insert(i, j);
        }
    }
    mask
}

fn check_enum_n(n: usize) -> Result<StrandCount, MatrixError> {
    if n > MAX_ENUM_STRANDS {
        return Err(MatrixError::StrandCountTooLarge(n));
    }
    StrandCount::new(n).map_err(|_| MatrixError::StrandCountTooLarge(n))
}

/// All T0 masks of size `n`, each once, in increasing bitset order.
///
/// Pairs are decided column by column, bottom row first, so that every triple
/// is fully decided at the moment its outer pair is set.
pub fn enumerate_t0(n: usize) -> Result<Vec<UpperMask>, MatrixError> {
    let size = check_enum_n(n)?;
    let order: Vec<(usize, usize)> = (2..=n).flat_map(|k| (1..k).rev().map(move |i| (i, k))).collect();
    let mut out = Vec::new();
    let mut mask = UpperMask::empty(size);
    fn go(order: &[(usize, usize)], at: usize, mask: &mut UpperMask, out: &mut Vec<UpperMask>) {
        let Some(&(i, k)) = order.get(at) else {
            out.push(*mask);
            return;
        };
        go(order, at + 1, mask, out);
        if (i + 1..k).all(|j| mask.contains(i, j) || mask.contains(j, k)) {
            mask.insert(i, k);
            go(order, at + 1, mask, out);
            mask.remove(i, k);
        }
    }
    go(&order, 0, &mut mask, &mut out);
    out.sort_unstable();
    Ok(out)
}

/// Number of T0 masks of size `n`, by filtering every mask against a
/// precomputed triple table.
pub fn count_t0(n: usize, exec: Exec) -> Result<u64, MatrixError> {
    check_enum_n(n)?;
    let mut triples: Vec<(u64, u64)> = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let outer = 1u64 << pair_index(n, i, k);
                let inner = (1u64 << pair_index(n, i, j)) | (1u64 << pair_index(n, j, k));
                triples.push((outer, inner));
            }
        }
    }
    let total = 1u64 << pair_count(n);
    let count = |range: std::ops::Range<u64>| {
        range.filter(|&bits| triples.iter().all(|&(o, inner)| bits & o == 0 || bits & inner != 0)).count() as u64
    };
    Ok(par::sum_chunks(0..total, 1 << 12, exec, count))
}
