//! Braid words and the three pair-count matrices attached to them.
//!
//! Strands and positions are numbered from 1, left to right at the top of the
//! braid. A word is read top to bottom; letter `k` is one crossing between the
//! strands currently at positions `k` and `k + 1`.
//!
//! Sign convention: a crossing is *positive* when the strand entering at the
//! left position passes over ([`Over::Left`]), negative otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported number of strands.
pub const MAX_STRANDS: u8 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("strand count {0} outside 1..={MAX_STRANDS}")]
    InvalidStrandCount(usize),
    #[error("letter {letter} out of range for {n} strands")]
    LetterOutOfRange { letter: usize, n: u8 },
    #[error("strand counts differ: {0} vs {1}")]
    MismatchedStrandCount(u8, u8),
    #[error("offset {offset} cannot place a {inner}-strand word into {outer} strands")]
    OffsetOutOfRange { offset: usize, inner: u8, outer: u8 },
    #[error("cannot parse token {0:?}")]
    BadToken(String),
    #[error("matrix shape is not {0}x{0}")]
    BadShape(usize),
}

/// Number of strands of a braid, `1..=16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct StrandCount(u8);

impl StrandCount {
    pub fn new(n: usize) -> Result<Self, BraidError> {
        if (1..=MAX_STRANDS as usize).contains(&n) {
            Ok(StrandCount(n as u8))
        } else {
            Err(BraidError::InvalidStrandCount(n))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for StrandCount {
    type Error = BraidError;
    fn try_from(n: u8) -> Result<Self, Self::Error> {
        StrandCount::new(n as usize)
    }
}

impl From<StrandCount> for u8 {
    fn from(n: StrandCount) -> u8 {
        n.0
    }
}

impl fmt::Display for StrandCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Position-to-label map: `image[p - 1]` is the label of the strand at position `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: StrandCount) -> Self {
        Permutation { image: (1..=n.0).collect() }
    }

    /// Label at 1-based position `p`.
    #[inline]
    pub fn label_at(&self, p: usize) -> usize {
        self.image[p - 1] as usize
    }

    /// Exchanges the labels at positions `k` and `k + 1`.
    #[inline]
    pub fn swap_adjacent(&mut self, k: usize) {
        self.image.swap(k - 1, k);
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(p, &l)| l as usize == p + 1)
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }
}

/// A square integer matrix with zero diagonal, indexed from 1.
///
/// Plays three roles: CN matrix (symmetric, non-negative), OU matrix
/// (non-negative) and crossing matrix (any integers).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairCountMatrix {
    n: StrandCount,
    entries: Vec<i64>,
}

impl PairCountMatrix {
    pub fn zero(n: StrandCount) -> Self {
        PairCountMatrix { n, entries: vec![0; n.get() * n.get()] }
    }

    /// Builds from row-major rows. The diagonal is taken as given.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, BraidError> {
        let n = StrandCount::new(rows.len())?;
        if rows.iter().any(|r| r.len() != n.get()) {
            return Err(BraidError::BadShape(n.get()));
        }
        Ok(PairCountMatrix { n, entries: rows.concat() })
    }

    pub fn n(&self) -> StrandCount {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[(i - 1) * self.n.get() + (j - 1)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        let n = self.n.get();
        self.entries[(i - 1) * n + (j - 1)] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: i64) {
        let n = self.n.get();
        self.entries[(i - 1) * n + (j - 1)] += v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n.get()).map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n.get();
        let mut t = PairCountMatrix::zero(self.n);
        for i in 1..=n {
            for j in 1..=n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise sum. Panics if the sizes differ.
    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        PairCountMatrix { n: self.n, entries }
    }

    pub fn scaled(&self, factor: i64) -> Self {
        PairCountMatrix { n: self.n, entries: self.entries.iter().map(|e| e * factor).collect() }
    }

    pub fn entry_sum(&self) -> i64 {
        self.entries.iter().sum()
    }

    pub fn is_zero_diagonal(&self) -> bool {
        (1..=self.n.get()).all(|i| self.get(i, i) == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n.get();
        (1..=n).all(|i| (i + 1..=n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_non_negative(&self) -> bool {
        self.entries.iter().all(|&e| e >= 0)
    }

    pub fn is_even(&self) -> bool {
        self.entries.iter().all(|&e| e % 2 == 0)
    }

    /// Off-diagonal pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n.get();
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n.get(), "entries": self.rows() })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, BraidError> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            entries: Vec<Vec<i64>>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| BraidError::BadToken(e.to_string()))?;
        if raw.entries.len() != raw.n {
            return Err(BraidError::BadShape(raw.n));
        }
        PairCountMatrix::from_rows(&raw.entries)
    }
}

impl fmt::Display for PairCountMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.n.get()) {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn check_letter(letter: usize, n: StrandCount) -> Result<u8, BraidError> {
    if letter >= 1 && letter < n.get() {
        Ok(letter as u8)
    } else {
        Err(BraidError::LetterOutOfRange { letter, n: n.0 })
    }
}

/// A braid projection: crossings without over/under information.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectionWord {
    n: StrandCount,
    letters: Vec<u8>,
}

impl ProjectionWord {
    pub fn new(n: StrandCount, letters: impl IntoIterator<Item = usize>) -> Result<Self, BraidError> {
        let letters = letters.into_iter().map(|k| check_letter(k, n)).collect::<Result<_, _>>()?;
        Ok(ProjectionWord { n, letters })
    }

    pub fn empty(n: StrandCount) -> Self {
        ProjectionWord { n, letters: Vec::new() }
    }

    pub fn n(&self) -> StrandCount {
        self.n
    }

    pub fn letters(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.letters.iter().map(|&k| k as usize)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn permutation(&self) -> Permutation {
        let mut perm = Permutation::identity(self.n);
        for k in self.letters() {
            perm.swap_adjacent(k);
        }
        perm
    }

    pub fn cn_matrix(&self) -> PairCountMatrix {
        let mut perm = Permutation::identity(self.n);
        let mut m = PairCountMatrix::zero(self.n);
        for k in self.letters() {
            let (a, b) = (perm.label_at(k), perm.label_at(k + 1));
            m.add(a, b, 1);
            m.add(b, a, 1);
            perm.swap_adjacent(k);
        }
        m
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().is_identity()
    }

    /// The product: `self` on top, `other` below.
    pub fn concat(&self, other: &ProjectionWord) -> Result<ProjectionWord, BraidError> {
        if self.n != other.n {
            return Err(BraidError::MismatchedStrandCount(self.n.0, other.n.0));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(ProjectionWord { n: self.n, letters })
    }

    /// Reflection in a vertical line: letter `k` becomes `n - k`.
    pub fn mirror(&self) -> ProjectionWord {
        let n = self.n.0;
        ProjectionWord { n: self.n, letters: self.letters.iter().map(|&k| n - k).collect() }
    }

    /// Places this word into `n` strands, with `offset - 1` idle strands on the left.
    pub fn embed(&self, n: StrandCount, offset: usize) -> Result<ProjectionWord, BraidError> {
        if offset == 0 || self.n.get() + offset - 1 > n.get() {
            return Err(BraidError::OffsetOutOfRange { offset, inner: self.n.0, outer: n.0 });
        }
        let shift = (offset - 1) as u8;
        Ok(ProjectionWord { n, letters: self.letters.iter().map(|&k| k + shift).collect() })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(n: StrandCount, text: &str) -> Result<Self, BraidError> {
        let letters = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| BraidError::BadToken(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        ProjectionWord::new(n, letters)
    }

    pub(crate) fn from_raw(n: StrandCount, letters: Vec<u8>) -> Self {
        debug_assert!(letters.iter().all(|&k| k >= 1 && k < n.0));
        ProjectionWord { n, letters }
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.letters
    }
}

impl fmt::Display for ProjectionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.letters.iter().map(u8::to_string).collect();
        f.write_str(&toks.join(" "))
    }
}

/// Which strand passes over at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Over {
    /// The strand entering from the left position is on top. Positive crossing.
    Left,
    /// The strand entering from the right position is on top. Negative crossing.
    Right,
}

impl Over {
    pub fn sign(self) -> i64 {
        match self {
            Over::Left => 1,
            Over::Right => -1,
        }
    }
}

/// A braid diagram: crossings with over/under information.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagramWord {
    n: StrandCount,
    letters: Vec<(u8, Over)>,
}

impl DiagramWord {
    pub fn new(n: StrandCount, letters: impl IntoIterator<Item = (usize, Over)>) -> Result<Self, BraidError> {
        let letters = letters.into_iter().map(|(k, o)| check_letter(k, n).map(|k| (k, o))).collect::<Result<_, _>>()?;
        Ok(DiagramWord { n, letters })
    }

    pub fn n(&self) -> StrandCount {
        self.n
    }

    pub fn letters(&self) -> impl ExactSizeIterator<Item = (usize, Over)> + '_ {
        self.letters.iter().map(|&(k, o)| (k as usize, o))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn forget(&self) -> ProjectionWord {
        ProjectionWord { n: self.n, letters: self.letters.iter().map(|&(k, _)| k).collect() }
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|&(_, o)| o == Over::Left)
    }

    pub fn is_pure(&self) -> bool {
        self.forget().is_pure()
    }

    /// Visits each crossing as `(over label, under label, over flag)`.
    fn for_each_crossing(&self, mut f: impl FnMut(usize, usize, Over)) {
        let mut perm = Permutation::identity(self.n);
        for (k, o) in self.letters() {
            let (left, right) = (perm.label_at(k), perm.label_at(k + 1));
            match o {
                Over::Left => f(left, right, o),
                Over::Right => f(right, left, o),
            }
            perm.swap_adjacent(k);
        }
    }

    pub fn ou_matrix(&self) -> PairCountMatrix {
        let mut m = PairCountMatrix::zero(self.n);
        self.for_each_crossing(|over, under, _| m.add(over, under, 1));
        m
    }

    pub fn crossing_matrix(&self) -> PairCountMatrix {
        let mut m = PairCountMatrix::zero(self.n);
        self.for_each_crossing(|over, under, o| m.add(over, under, o.sign()));
        m
    }

    pub fn parse(n: StrandCount, text: &str) -> Result<Self, BraidError> {
        let letters = text
            .split_whitespace()
            .map(|t| {
                let bad = || BraidError::BadToken(t.to_string());
                let (o, digits) = match t.as_bytes().first() {
                    Some(b'+') => (Over::Left, &t[1..]),
                    Some(b'-') => (Over::Right, &t[1..]),
                    _ => return Err(bad()),
                };
                digits.parse::<usize>().map(|k| (k, o)).map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        DiagramWord::new(n, letters)
    }
}

impl fmt::Display for DiagramWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> =
            self.letters.iter().map(|&(k, o)| format!("{}{}", if o == Over::Left { '+' } else { '-' }, k)).collect();
        f.write_str(&toks.join(" "))
    }
}

impl FromStr for StrandCount {
    type Err = BraidError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n: usize = s.trim().parse().map_err(|_| BraidError::BadToken(s.to_string()))?;
        StrandCount::new(n)
    }
}
