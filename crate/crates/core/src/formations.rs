//! Formation families of (0,2)-masks together with explicit realizing words.
//!
//! Each descriptor knows its support ([`formation_matrix`]) and a projection
//! word whose CN matrix is exactly that support ([`realize`]). Words are built
//! from the row/column white sequences and the shortening scripts of the
//! black hooks; optional entries are added by inserting a `W W` pair at a
//! moment where the two strands sit next to each other.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::braid::{ProjectionWord, StrandCount};
use crate::matrix::UpperMask;

/// Largest strand count for which descriptors are enumerated.
pub const MAX_FORMATION_STRANDS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormationError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("cannot parse formation {0:?}")]
    Parse(String),
    #[error("construction failed for {0}")]
    Construction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    R,
    C,
    Rc,
    AlphaPair,
    CSharpR,
    H,
    L1,
    L2,
    L3,
}

/// Upper half of an α₁-α₂ pair: `c(k,l)` or `rc(k,l)` with its `J, I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Upper {
    C,
    Rc { j: usize, i: usize },
}

/// Lower half of an α₁-α₂ pair: `r(l-1,m)` or `rc(l-1,m)` with its `J, I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lower {
    R,
    Rc { j: usize, i: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HFlags {
    /// `(k, m)`
    pub km: bool,
    /// `(m+1, l)`
    pub ml: bool,
    /// `(m-1, m+1)`
    pub pre: bool,
    /// `(m, m+2)`
    pub post: bool,
    /// `(k-1, k+1)`
    pub top: bool,
    /// `(l-1, l+1)`
    pub bottom: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LoupeFlags {
    /// L1, L3: `(k, k+2)`; L2: `(k, k+3)`
    pub first: bool,
    /// L1: `(k+1, k+3)`; L2: `(k+2, k+4)`; L3: `(k+1, k+4)`
    pub second: bool,
    /// L1 only: `(k-1, k+1)`
    pub top: bool,
    /// L1 only: `(k+2, l+1)`
    pub bottom: bool,
    /// Remove `(k, l)`.
    pub drop: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    R { k: usize, j: usize },
    C { i: usize, l: usize },
    Rc { k: usize, l: usize, j: usize, i: usize },
    Alpha { k: usize, l: usize, m: usize, upper: Upper, lower: Lower },
    CSharpR { k: usize, l: usize, m: usize, double: bool },
    H { k: usize, l: usize, m: usize, flags: HFlags },
    L1 { k: usize, l: usize, flags: LoupeFlags },
    L2 { k: usize, l: usize, flags: LoupeFlags },
    L3 { k: usize, l: usize, flags: LoupeFlags },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormationDescriptor {
    pub n: StrandCount,
    pub shape: Shape,
    /// Take the image under the reverse-matrix map.
    pub reversed: bool,
}

impl Shape {
    pub fn family(&self) -> Family {
        match self {
            Shape::R { .. } => Family::R,
            Shape::C { .. } => Family::C,
            Shape::Rc { .. } => Family::Rc,
            Shape::Alpha { .. } => Family::AlphaPair,
            Shape::CSharpR { .. } => Family::CSharpR,
            Shape::H { .. } => Family::H,
            Shape::L1 { .. } => Family::L1,
            Shape::L2 { .. } => Family::L2,
            Shape::L3 { .. } => Family::L3,
        }
    }
}

fn invalid(msg: impl Into<String>) -> FormationError {
    FormationError::InvalidParameters(msg.into())
}

fn rc_ok(k: usize, l: usize, j: usize, i: usize) -> bool {
    k < j && j < l && k < i && i < l && i <= j + 1
}

impl FormationDescriptor {
    pub fn new(n: StrandCount, shape: Shape) -> Result<Self, FormationError> {
        let d = FormationDescriptor { n, shape, reversed: false };
        d.validate()?;
        Ok(d)
    }

    pub fn reversed(self) -> Self {
        FormationDescriptor { reversed: !self.reversed, ..self }
    }

    pub fn family(&self) -> Family {
        self.shape.family()
    }

    pub fn validate(&self) -> Result<(), FormationError> {
        let n = self.n.get();
        if n > MAX_FORMATION_STRANDS {
            return Err(invalid(format!("formations are supported up to {MAX_FORMATION_STRANDS} strands")));
        }
        let ok = match self.shape {
            Shape::R { k, j } => 1 <= k && k < j && j <= n,
            Shape::C { i, l } => 1 <= i && i < l && l <= n,
            Shape::Rc { k, l, j, i } => k >= 1 && l <= n && rc_ok(k, l, j, i),
            Shape::Alpha { k, l, m, upper, lower } => {
                let up = match upper {
                    Upper::C => k >= 1 && k + 2 <= l,
                    Upper::Rc { j, i } => k >= 1 && rc_ok(k, l, j, i),
                };
                let low = match lower {
                    Lower::R => m > l,
                    Lower::Rc { j, i } => l >= 2 && rc_ok(l - 1, m, j, i) && j >= l,
                };
                up && low && m <= n
            }
            Shape::CSharpR { k, l, m, double } => k >= 1 && k + 2 <= l && l < m && m <= n && (!double || m >= l + 2),
            Shape::H { k, l, m, flags } => {
                k >= 1
                    && k < m
                    && m + 2 <= l
                    && l <= n
                    && (!flags.pre || m >= k + 2)
                    && (!flags.post || l >= m + 3)
                    && (!flags.top || k >= 2)
                    && (!flags.bottom || l < n)
            }
            Shape::L1 { k, l, flags } => {
                k >= 1
                    && k + 3 <= l
                    && l <= n
                    && (!flags.top || k >= 2)
                    && (!flags.bottom || l < n)
                    && !(flags.drop && (flags.top || flags.bottom))
            }
            Shape::L2 { k, l, flags } | Shape::L3 { k, l, flags } => {
                k >= 1 && k + 4 <= l && l <= n && !flags.top && !flags.bottom
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(self.to_string()))
        }
    }
}

/// Pairs of the unreversed support, possibly with repeats.
fn support_pairs(shape: &Shape) -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    match *shape {
        Shape::R { k, j } => p.extend((k + 1..=j).map(|x| (k, x))),
        Shape::C { i, l } => p.extend((i..l).map(|x| (x, l))),
        Shape::Rc { k, l, j, i } => {
            p.extend((k + 1..=j).map(|x| (k, x)));
            p.extend((i..l).map(|x| (x, l)));
            p.push((k, l));
        }
        Shape::Alpha { k, l, m, upper, lower } => {
            match upper {
                Upper::C => p.extend(support_pairs(&Shape::C { i: k, l })),
                Upper::Rc { j, i } => p.extend(support_pairs(&Shape::Rc { k, l, j, i })),
            }
            match lower {
                Lower::R => p.extend(support_pairs(&Shape::R { k: l - 1, j: m })),
                Lower::Rc { j, i } => p.extend(support_pairs(&Shape::Rc { k: l - 1, l: m, j, i })),
            }
        }
        Shape::CSharpR { k, l, m, double } => {
            p.extend(support_pairs(&Shape::C { i: k, l }));
            p.extend(support_pairs(&Shape::R { k: l - 1, j: m }));
            p.push((l - 2, l + 1));
            if double {
                p.push((l - 2, l + 2));
            }
        }
        Shape::H { k, l, m, flags } => {
            p.extend([(k, m + 1), (k, l), (m, l), (m, m + 1)]);
            p.extend((k + 1..m).map(|x| (k, x)));
            p.extend((m + 2..l).map(|x| (x, l)));
            let optional = [
                (flags.km, (k, m)),
                (flags.ml, (m + 1, l)),
                (flags.pre, (m - 1, m + 1)),
                (flags.post, (m, m + 2)),
                (flags.top, (k.wrapping_sub(1), k + 1)),
                (flags.bottom, (l - 1, l + 1)),
            ];
            p.extend(optional.into_iter().filter(|o| o.0).map(|o| o.1));
        }
        Shape::L1 { k, l, flags } => {
            p.push((k, k + 1));
            p.extend((k + 3..=l).map(|x| (k, x)));
            p.extend((k + 3..=l).map(|x| (k + 2, x)));
            let optional = [
                (flags.first, (k, k + 2)),
                (flags.second, (k + 1, k + 3)),
                (flags.top, (k.wrapping_sub(1), k + 1)),
                (flags.bottom, (k + 2, l + 1)),
            ];
            p.extend(optional.into_iter().filter(|o| o.0).map(|o| o.1));
        }
        Shape::L2 { k, l, flags } => {
            p.extend([(k, k + 1), (k, k + 2)]);
            p.extend((k + 4..=l).map(|x| (k, x)));
            p.extend((k + 4..=l).map(|x| (k + 3, x)));
            p.extend(
                [(flags.first, (k, k + 3)), (flags.second, (k + 2, k + 4))].into_iter().filter(|o| o.0).map(|o| o.1),
            );
        }
        Shape::L3 { k, l, flags } => {
            p.push((k, k + 1));
            p.extend((k + 4..=l).map(|x| (k, x)));
            p.extend((k + 4..=l).map(|x| (k + 2, x)));
            p.extend((k + 4..=l).map(|x| (k + 3, x)));
            p.extend(
                [(flags.first, (k, k + 2)), (flags.second, (k + 1, k + 4))].into_iter().filter(|o| o.0).map(|o| o.1),
            );
        }
    }
    if let Shape::L1 { k, l, flags } | Shape::L2 { k, l, flags } | Shape::L3 { k, l, flags } = *shape {
        if flags.drop {
            p.retain(|&q| q != (k, l));
        }
    }
    p
}

pub fn formation_matrix(f: &FormationDescriptor) -> Result<UpperMask, FormationError> {
    f.validate()?;
    let mask = UpperMask::from_pairs(f.n, support_pairs(&f.shape)).map_err(|e| invalid(e.to_string()))?;
    Ok(if f.reversed { mask.reverse() } else { mask })
}

/// Whether the descriptor is valid and its support satisfies T0.
pub fn is_admissible(f: &FormationDescriptor) -> bool {
    formation_matrix(f).map(|m| m.is_t0()).unwrap_or(false)
}

fn row_word(k: usize, j: usize) -> Vec<usize> {
    (k..j).chain((k..j).rev()).collect()
}

fn col_word(i: usize, l: usize) -> Vec<usize> {
    (i..l).rev().chain(i..l).collect()
}

/// Row-side shortenings allowed for the hook of rc(k,l;J,I); the rest of
/// the `l - k - 1` steps come from the column side.
fn rc_splits(k: usize, l: usize, j: usize, i: usize) -> std::ops::RangeInclusive<usize> {
    (i - k).saturating_sub(1)..=(j - k).min(l - k - 1)
}

/// rc(k,l;J,I) shortening its hook by `up` row-side crossings. `J = k` (no
/// row part) and `I = l` (no column part) are allowed.
fn rc_word_split(k: usize, l: usize, j: usize, i: usize, up: usize) -> Vec<usize> {
    let row = row_word(k, j);
    let col = col_word(i, l);
    let down = l - k - 1 - up;
    let mut w = row[..row.len() - up].to_vec();
    w.extend((l - down..l).rev());
    w.extend([k + up, k + up]);
    w.extend((k..k + up).rev());
    w.extend_from_slice(&col[down..]);
    w
}

fn rc_word(k: usize, l: usize, j: usize, i: usize) -> Vec<usize> {
    rc_word_split(k, l, j, i, *rc_splits(k, l, j, i).end())
}

/// Joins two words sharing the `W(l-1) W(l-1)` pair at the seam.
fn join_shared(mut upper: Vec<usize>, lower: &[usize], shared: usize) -> Vec<usize> {
    debug_assert_eq!(upper.last(), Some(&shared));
    debug_assert_eq!(lower.first(), Some(&shared));
    upper.pop();
    upper.extend_from_slice(&lower[1..]);
    upper
}

fn alpha_word(k: usize, l: usize, m: usize, upper: Upper, lower: Lower) -> Vec<usize> {
    let w1 = match upper {
        Upper::C => col_word(k, l),
        Upper::Rc { j, i } => rc_word(k, l, j, i),
    };
    let w2 = match lower {
        Lower::R => row_word(l - 1, m),
        Lower::Rc { j, i } => rc_word(l - 1, m, j, i),
    };
    join_shared(w1, &w2, l - 1)
}

fn sharp_word(k: usize, l: usize, m: usize, double: bool) -> Vec<usize> {
    let mut w: Vec<usize> = (k..l).rev().collect();
    w.extend(l..m);
    if double {
        w.extend([l - 1, l, l, l - 1]);
    } else {
        w.extend([l - 1, l - 1]);
    }
    w.extend((l..m).rev());
    w.extend(k..l);
    w
}

fn loupe_word(family: Family, k: usize, l: usize) -> Vec<usize> {
    let mut w = Vec::new();
    match family {
        Family::L1 => {
            w.push(k);
            for j in k + 3..=l {
                w.extend([j - 1, j - 2]);
            }
            for j in (k + 3..=l).rev() {
                w.extend([j - 2, j - 1]);
            }
            w.push(k);
        }
        Family::L2 => {
            w.extend([k, k + 1]);
            for j in k + 4..=l {
                w.extend([j - 1, j - 2]);
            }
            for j in (k + 4..=l).rev() {
                w.extend([j - 2, j - 1]);
            }
            w.extend([k + 1, k]);
        }
        _ => {
            w.push(k);
            for j in k + 4..=l {
                w.extend([j - 1, j - 2, j - 3]);
            }
            for j in (k + 4..=l).rev() {
                w.extend([j - 3, j - 2, j - 1]);
            }
            w.push(k);
        }
    }
    w
}

fn positions_after(n: usize, letters: impl Iterator<Item = usize>) -> Vec<usize> {
    // pos[label] = position
    let mut at: Vec<usize> = (0..=n).collect();
    let mut pos: Vec<usize> = (0..=n).collect();
    for k in letters {
        let (a, b) = (at[k], at[k + 1]);
        at.swap(k, k + 1);
        pos[a] = k + 1;
        pos[b] = k;
    }
    pos
}

const HOOK_STATE_CAP: usize = 200_000;

/// Inserts `p p` into `word` at a moment (an order ideal of its commutation
/// trace) where strands `a` and `b` occupy positions `p, p+1`.
pub(crate) fn insert_hook(n: usize, word: &[usize], a: usize, b: usize) -> Option<Vec<usize>> {
    let adjacent = |pos: &[usize]| (pos[a].abs_diff(pos[b]) == 1).then(|| pos[a].min(pos[b]));
    for t in 0..=word.len() {
        if let Some(p) = adjacent(&positions_after(n, word[..t].iter().copied())) {
            let mut out = word[..t].to_vec();
            out.extend([p, p]);
            out.extend_from_slice(&word[t..]);
            return Some(out);
        }
    }
    if word.len() > 128 {
        return None;
    }
    let blocks = |x: usize, y: usize| word[x].abs_diff(word[y]) <= 1;
    let mut seen = HashSet::from([0u128]);
    let mut queue = VecDeque::from([0u128]);
    while let Some(state) = queue.pop_front() {
        let taken = |x: usize| state >> x & 1 == 1;
        let pos = positions_after(n, (0..word.len()).filter(|&x| taken(x)).map(|x| word[x]));
        if let Some(p) = adjacent(&pos) {
            let mut out: Vec<usize> = (0..word.len()).filter(|&x| taken(x)).map(|x| word[x]).collect();
            out.extend([p, p]);
            out.extend((0..word.len()).filter(|&x| !taken(x)).map(|x| word[x]));
            return Some(out);
        }
        for x in 0..word.len() {
            if taken(x) || (0..x).any(|y| !taken(y) && blocks(y, x)) {
                continue;
            }
            let next = state | 1 << x;
            if seen.len() < HOOK_STATE_CAP && seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    None
}

/// Removes an adjacent `p p` pair whose two crossings are between strands `a` and `b`.
fn remove_hook(n: usize, word: &[usize], a: usize, b: usize) -> Option<Vec<usize>> {
    (0..word.len().saturating_sub(1)).find_map(|t| {
        if word[t] != word[t + 1] {
            return None;
        }
        let pos = positions_after(n, word[..t].iter().copied());
        let p = word[t];
        let here = [pos[a], pos[b]];
        (here == [p, p + 1] || here == [p + 1, p]).then(|| {
            let mut out = word[..t].to_vec();
            out.extend_from_slice(&word[t + 2..]);
            out
        })
    })
}

fn add_hooks(
    n: usize,
    mut w: Vec<usize>,
    hooks: &[(bool, (usize, usize))],
    f: &FormationDescriptor,
) -> Result<Vec<usize>, FormationError> {
    for &(on, (a, b)) in hooks {
        if on {
            w = insert_hook(n, &w, a, b).ok_or_else(|| FormationError::Construction(f.to_string()))?;
        }
    }
    Ok(w)
}

fn unreversed_word(f: &FormationDescriptor) -> Result<Vec<usize>, FormationError> {
    let n = f.n.get();
    let fail = || FormationError::Construction(f.to_string());
    let w = match f.shape {
        Shape::R { k, j } => row_word(k, j),
        Shape::C { i, l } => col_word(i, l),
        Shape::Rc { k, l, j, i } => rc_word(k, l, j, i),
        Shape::Alpha { k, l, m, upper, lower } => alpha_word(k, l, m, upper, lower),
        Shape::CSharpR { k, l, m, double } => sharp_word(k, l, m, double),
        Shape::H { k, l, m, flags } => {
            let j1 = if flags.km { m } else { m - 1 };
            let i1 = if flags.pre { m - 1 } else { m };
            let j2 = if flags.post { m + 2 } else { m + 1 };
            let i2 = if flags.ml { m + 1 } else { m + 2 };
            let mut found = None;
            'search: for up1 in rc_splits(k, m + 1, j1, i1).rev() {
                for up2 in rc_splits(m, l, j2, i2) {
                    let w = join_shared(rc_word_split(k, m + 1, j1, i1, up1), &rc_word_split(m, l, j2, i2, up2), m);
                    if let Some(w) = insert_hook(n, &w, k, l) {
                        found = Some(w);
                        break 'search;
                    }
                }
            }
            let base = found.ok_or_else(fail)?;
            add_hooks(n, base, &[(flags.top, (k.wrapping_sub(1), k + 1)), (flags.bottom, (l - 1, l + 1))], f)?
        }
        Shape::L1 { k, l, flags } | Shape::L2 { k, l, flags } | Shape::L3 { k, l, flags } => {
            let family = f.family();
            let mut base = loupe_word(family, k, l);
            if flags.drop {
                base = remove_hook(n, &base, k, l).ok_or_else(fail)?;
            }
            let (first, second) = match family {
                Family::L1 => ((k, k + 2), (k + 1, k + 3)),
                Family::L2 => ((k, k + 3), (k + 2, k + 4)),
                _ => ((k, k + 2), (k + 1, k + 4)),
            };
            add_hooks(
                n,
                base,
                &[
                    (flags.first, first),
                    (flags.second, second),
                    (flags.top, (k.wrapping_sub(1), k + 1)),
                    (flags.bottom, (k + 2, l + 1)),
                ],
                f,
            )?
        }
    };
    Ok(w)
}

/// A projection word whose CN matrix is exactly the formation's support.
pub fn realize(f: &FormationDescriptor) -> Result<ProjectionWord, FormationError> {
    f.validate()?;
    let letters = unreversed_word(f)?;
    let w = ProjectionWord::new(f.n, letters).map_err(|_| FormationError::Construction(f.to_string()))?;
    Ok(if f.reversed { w.mirror() } else { w })
}

fn bools(count: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << count).map(move |b| (0..count).map(|x| b >> x & 1 == 1).collect())
}

fn shapes_for(n: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    for k in 1..=n {
        for j in k + 1..=n {
            out.push(Shape::R { k, j });
        }
    }
    for l in 1..=n {
        for i in 1..l {
            out.push(Shape::C { i, l });
        }
    }
    let rc_params = |k: usize, l: usize| {
        let mut v = Vec::new();
        for j in k + 1..l {
            for i in k + 1..l {
                if i <= j + 1 {
                    v.push((j, i));
                }
            }
        }
        v
    };
    for k in 1..=n {
        for l in k + 2..=n {
            for (j, i) in rc_params(k, l) {
                out.push(Shape::Rc { k, l, j, i });
            }
        }
    }
    for k in 1..=n {
        for l in k + 2..=n {
            let uppers: Vec<Upper> =
                std::iter::once(Upper::C).chain(rc_params(k, l).into_iter().map(|(j, i)| Upper::Rc { j, i })).collect();
            for m in l + 1..=n {
                let lowers: Vec<Lower> = std::iter::once(Lower::R)
                    .chain(rc_params(l - 1, m).into_iter().filter(|&(j, _)| j >= l).map(|(j, i)| Lower::Rc { j, i }))
                    .collect();
                for &upper in &uppers {
                    for &lower in &lowers {
                        out.push(Shape::Alpha { k, l, m, upper, lower });
                    }
                }
            }
        }
    }
    for k in 1..=n {
        for l in k + 2..=n {
            for m in l + 1..=n {
                for double in [false, true] {
                    out.push(Shape::CSharpR { k, l, m, double });
                }
            }
        }
    }
    for k in 1..=n {
        for m in k + 1..=n {
            for l in m + 2..=n {
                for b in bools(6) {
                    let flags = HFlags { km: b[0], ml: b[1], pre: b[2], post: b[3], top: b[4], bottom: b[5] };
                    out.push(Shape::H { k, l, m, flags });
                }
            }
        }
    }
    for k in 1..=n {
        for l in k + 3..=n {
            for b in bools(5) {
                let flags = LoupeFlags { first: b[0], second: b[1], top: b[2], bottom: b[3], drop: b[4] };
                out.push(Shape::L1 { k, l, flags });
                if !flags.top && !flags.bottom && l >= k + 4 {
                    out.push(Shape::L2 { k, l, flags });
                    out.push(Shape::L3 { k, l, flags });
                }
            }
        }
    }
    out.sort();
    out
}

/// Every admissible descriptor on `n` strands with its support, unreversed
/// forms first, in family/parameter order.
pub fn all_descriptors(n: StrandCount) -> Result<&'static [(FormationDescriptor, UpperMask)], FormationError> {
    static CACHE: [OnceLock<Vec<(FormationDescriptor, UpperMask)>>; MAX_FORMATION_STRANDS + 1] =
        [const { OnceLock::new() }; MAX_FORMATION_STRANDS + 1];
    let size = n.get();
    if size > MAX_FORMATION_STRANDS {
        return Err(invalid(format!("formations are supported up to {MAX_FORMATION_STRANDS} strands")));
    }
    Ok(CACHE[size].get_or_init(|| {
        let base: Vec<(FormationDescriptor, UpperMask)> = shapes_for(size)
            .into_iter()
            .map(|shape| FormationDescriptor { n, shape, reversed: false })
            .filter_map(|f| formation_matrix(&f).ok().filter(UpperMask::is_t0).map(|m| (f, m)))
            .collect();
        let reversed: Vec<_> = base.iter().map(|(f, m)| (f.reversed(), m.reverse())).collect();
        base.into_iter().chain(reversed).collect()
    }))
}

/// All admissible descriptors (and reverses) whose support lies inside `mask`.
pub fn detect(mask: &UpperMask) -> Vec<FormationDescriptor> {
    match all_descriptors(mask.n()) {
        Ok(all) => all.iter().filter(|(_, m)| m.is_subset_of(mask)).map(|(f, _)| *f).collect(),
        Err(_) => Vec::new(),
    }
}

impl fmt::Display for FormationDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut flags: Vec<&str> = Vec::new();
        match self.shape {
            Shape::R { k, j } => write!(f, "R k={k} J={j}")?,
            Shape::C { i, l } => write!(f, "C I={i} l={l}")?,
            Shape::Rc { k, l, j, i } => write!(f, "RC k={k} l={l} J={j} I={i}")?,
            Shape::Alpha { k, l, m, upper, lower } => {
                let up = if matches!(upper, Upper::C) { "C" } else { "RC" };
                let low = if matches!(lower, Lower::R) { "R" } else { "RC" };
                write!(f, "{up}-{low} k={k} l={l} m={m}")?;
                if let Upper::Rc { j, i } = upper {
                    write!(f, " J1={j} I1={i}")?;
                }
                if let Lower::Rc { j, i } = lower {
                    write!(f, " J2={j} I2={i}")?;
                }
            }
            Shape::CSharpR { k, l, m, double } => {
                write!(f, "C#R k={k} l={l} m={m}")?;
                if double {
                    flags.push("double");
                }
            }
            Shape::H { k, l, m, flags: h } => {
                write!(f, "H k={k} l={l} m={m}")?;
                let named = [
                    (h.km, "km"),
                    (h.ml, "ml"),
                    (h.pre, "pre"),
                    (h.post, "post"),
                    (h.top, "top"),
                    (h.bottom, "bottom"),
                ];
                flags.extend(named.into_iter().filter(|x| x.0).map(|x| x.1));
            }
            Shape::L1 { k, l, flags: g } | Shape::L2 { k, l, flags: g } | Shape::L3 { k, l, flags: g } => {
                write!(f, "{:?} k={k} l={l}", self.family())?;
                let named =
                    [(g.first, "first"), (g.second, "second"), (g.top, "top"), (g.bottom, "bottom"), (g.drop, "drop")];
                flags.extend(named.into_iter().filter(|x| x.0).map(|x| x.1));
            }
        }
        if self.reversed {
            flags.push("rev");
        }
        if !flags.is_empty() {
            write!(f, " flags={}", flags.join(","))?;
        }
        Ok(())
    }
}

impl FormationDescriptor {
    /// Parses the text form, e.g. `H k=1 l=6 m=3 flags=km,ml`.
    pub fn parse(n: StrandCount, text: &str) -> Result<Self, FormationError> {
        let bad = || FormationError::Parse(text.to_string());
        let mut toks = text.split_whitespace();
        let family = toks.next().ok_or_else(bad)?;
        let mut vals = std::collections::HashMap::new();
        let mut flags: HashSet<&str> = HashSet::new();
        for t in toks {
            let (key, v) = t.split_once('=').ok_or_else(bad)?;
            if key == "flags" {
                flags.extend(v.split(',').filter(|s| !s.is_empty()));
            } else {
                vals.insert(key, v.parse::<usize>().map_err(|_| bad())?);
            }
        }
        let get = |key: &str| vals.get(key).copied().ok_or_else(bad);
        let has = |flag: &str| flags.contains(flag);
        let loupe = || LoupeFlags {
            first: has("first"),
            second: has("second"),
            top: has("top"),
            bottom: has("bottom"),
            drop: has("drop"),
        };
        let shape = match family {
            "R" => Shape::R { k: get("k")?, j: get("J")? },
            "C" => Shape::C { i: get("I")?, l: get("l")? },
            "RC" => Shape::Rc { k: get("k")?, l: get("l")?, j: get("J")?, i: get("I")? },
            "C-R" | "C-RC" | "RC-R" | "RC-RC" => {
                let (up, low) = family.split_once('-').ok_or_else(bad)?;
                let upper = if up == "C" { Upper::C } else { Upper::Rc { j: get("J1")?, i: get("I1")? } };
                let lower = if low == "R" { Lower::R } else { Lower::Rc { j: get("J2")?, i: get("I2")? } };
                Shape::Alpha { k: get("k")?, l: get("l")?, m: get("m")?, upper, lower }
            }
            "C#R" => Shape::CSharpR { k: get("k")?, l: get("l")?, m: get("m")?, double: has("double") },
            "H" => Shape::H {
                k: get("k")?,
                l: get("l")?,
                m: get("m")?,
                flags: HFlags {
                    km: has("km"),
                    ml: has("ml"),
                    pre: has("pre"),
                    post: has("post"),
                    top: has("top"),
                    bottom: has("bottom"),
                },
            },
            "L1" => Shape::L1 { k: get("k")?, l: get("l")?, flags: loupe() },
            "L2" => Shape::L2 { k: get("k")?, l: get("l")?, flags: loupe() },
            "L3" => Shape::L3 { k: get("k")?, l: get("l")?, flags: loupe() },
            _ => return Err(bad()),
        };
        let d = FormationDescriptor { n, shape, reversed: has("rev") };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(n: usize) -> StrandCount {
        StrandCount::new(n).unwrap()
    }

    fn mask(n: usize, pairs: &[(usize, usize)]) -> UpperMask {
        UpperMask::from_pairs(sc(n), pairs.iter().copied()).unwrap()
    }

    fn desc(n: usize, shape: Shape) -> FormationDescriptor {
        FormationDescriptor::new(sc(n), shape).unwrap()
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(formation_matrix(&desc(6, Shape::R { k: 2, j: 4 })).unwrap(), mask(6, &[(2, 3), (2, 4)]));
        assert_eq!(formation_matrix(&desc(6, Shape::C { i: 3, l: 6 })).unwrap(), mask(6, &[(3, 6), (4, 6), (5, 6)]));
        let h = desc(6, Shape::H { k: 1, l: 6, m: 3, flags: HFlags::default() });
        assert_eq!(formation_matrix(&h).unwrap(), mask(6, &[(1, 2), (1, 4), (1, 6), (3, 4), (3, 6), (5, 6)]));
    }

    #[test]
    fn word_examples() {
        assert_eq!(realize(&desc(3, Shape::R { k: 1, j: 3 })).unwrap().to_string(), "1 2 2 1");
        assert_eq!(realize(&desc(3, Shape::C { i: 1, l: 3 })).unwrap().to_string(), "2 1 1 2");
        let rc = desc(4, Shape::Rc { k: 1, l: 4, j: 2, i: 3 });
        let w = realize(&rc).unwrap();
        assert_eq!(w.cn_matrix(), mask(4, &[(1, 2), (1, 4), (3, 4)]).to_matrix());
        assert!(w.is_pure());
    }

    #[test]
    fn invalid_parameters() {
        assert!(FormationDescriptor::new(sc(4), Shape::Rc { k: 1, l: 4, j: 1, i: 3 }).is_err());
        assert!(FormationDescriptor::new(sc(4), Shape::Rc { k: 1, l: 4, j: 2, i: 4 }).is_err());
        assert!(FormationDescriptor::new(sc(5), Shape::H { k: 2, l: 5, m: 1, flags: HFlags::default() }).is_err());
        assert!(FormationDescriptor::new(sc(10), Shape::R { k: 1, j: 2 }).is_err());
    }

    #[test]
    fn detect_examples() {
        let found = detect(&mask(3, &[(1, 2)]));
        assert!(found.iter().any(|f| f.shape == Shape::R { k: 1, j: 2 } && !f.reversed));
        assert!(found.iter().any(|f| f.shape == Shape::C { i: 1, l: 2 } && !f.reversed));
        assert!(detect(&mask(3, &[(1, 3)])).is_empty());
        let h = desc(6, Shape::H { k: 1, l: 6, m: 3, flags: HFlags::default() });
        assert!(detect(&formation_matrix(&h).unwrap()).contains(&h));
    }

    #[test]
    fn round_trip_up_to_six_strands() {
        let mut failures = Vec::new();
        for n in 1..=6 {
            for (f, m) in all_descriptors(sc(n)).unwrap() {
                match realize(f) {
                    Ok(w) if w.cn_matrix() == m.to_matrix() && w.is_pure() => {}
                    Ok(w) => failures.push(format!("n={n} {f} -> {w}")),
                    Err(e) => failures.push(format!("n={n} {f}: {e}")),
                }
            }
        }
        assert!(failures.is_empty(), "{} failures, e.g. {:#?}", failures.len(), &failures[..failures.len().min(25)]);
    }

    #[test]
    fn text_roundtrip() {
        for f in all_descriptors(sc(7)).unwrap() {
            let text = f.0.to_string();
            assert_eq!(FormationDescriptor::parse(sc(7), &text).unwrap(), f.0, "{text}");
        }
        let h = FormationDescriptor::parse(sc(6), "H k=1 l=6 m=3 flags=km,ml").unwrap();
        assert!(matches!(h.shape, Shape::H { flags: HFlags { km: true, ml: true, pre: false, .. }, .. }));
        assert!(FormationDescriptor::parse(sc(6), "Q k=1").is_err());
    }

    #[test]
    fn hook_insertion_needs_adjacency() {
        // In the empty word on 3 strands, strands 1 and 3 never meet.
        assert_eq!(insert_hook(3, &[], 1, 3), None);
        assert_eq!(insert_hook(3, &[1, 1], 1, 3), Some(vec![1, 2, 2, 1]));
    }
}
