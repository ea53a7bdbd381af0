//! BW-ladder diagrams and the ladder moves L1-L9.
//!
//! A black edge `B(i,j)` is a hook between the strands at positions `i` and
//! `j`: it adds 2 to their pair count and leaves the permutation alone. A
//! white edge `W(k)` is a single crossing at positions `k, k+1`.
//!
//! The search works on traces: L2, L3 and L5 only exchange commuting
//! neighbours, so states are stored in lexicographic normal form and the
//! remaining moves are applied to any edges that can be brought together by
//! commutations. Every commutation used is still recorded in the returned
//! [`MoveTrace`], so a trace replays move by move on the original diagram.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{PairCountMatrix, Permutation, ProjectionWord, StrandCount};
use crate::matrix::UpperMask;

/// Default node budget for [`search_w_form`].
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LadderError {
    #[error("edge {0} out of range for {1} strands")]
    IndexOutOfRange(String, usize),
    #[error("diagram still has a black edge at index {0}")]
    BlackEdgePresent(usize),
    #[error("move {0} does not apply")]
    IllegalMove(String),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(usize),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("multiplicity for pair {0}-{1} must be positive")]
    BadMultiplicity(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LadderEdge {
    /// Hook between positions `i < j`.
    Black(u8, u8),
    /// Crossing at positions `k, k+1`.
    White(u8),
}

impl LadderEdge {
    fn check(self, n: usize) -> Result<Self, LadderError> {
        let ok = match self {
            LadderEdge::Black(i, j) => 1 <= i && i < j && (j as usize) <= n,
            LadderEdge::White(k) => 1 <= k && (k as usize) < n,
        };
        if ok {
            Ok(self)
        } else {
            Err(LadderError::IndexOutOfRange(self.to_string(), n))
        }
    }

    fn is_black(self) -> bool {
        matches!(self, LadderEdge::Black(..))
    }

    /// Contribution to the search heuristic: black length, whites are free.
    fn weight(self) -> usize {
        match self {
            LadderEdge::Black(i, j) => (j - i) as usize,
            LadderEdge::White(_) => 0,
        }
    }
}

impl fmt::Display for LadderEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LadderEdge::Black(i, j) => write!(f, "B{i}.{j}"),
            LadderEdge::White(k) => write!(f, "W{k}"),
        }
    }
}

impl std::str::FromStr for LadderEdge {
    type Err = LadderError;
    fn from_str(t: &str) -> Result<Self, Self::Err> {
        let bad = || LadderError::Parse(t.to_string());
        if let Some(rest) = t.strip_prefix('B') {
            let (i, j) = rest.split_once('.').ok_or_else(bad)?;
            Ok(LadderEdge::Black(i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?))
        } else if let Some(rest) = t.strip_prefix('W') {
            Ok(LadderEdge::White(rest.parse().map_err(|_| bad())?))
        } else {
            Err(bad())
        }
    }
}

/// Whether two edges may be exchanged when adjacent (moves L2, L3, L5).
pub fn commutes(a: LadderEdge, b: LadderEdge) -> bool {
    use LadderEdge::*;
    match (a, b) {
        (Black(..), Black(..)) => true,
        (White(k), White(l)) => k + 1 < l || l + 1 < k,
        (Black(i, j), White(k)) | (White(k), Black(i, j)) => j < k || k + 1 < i || (i < k && k + 1 < j),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LadderDiagram {
    n: StrandCount,
    edges: Vec<LadderEdge>,
}

/// Result of evaluating a diagram from the identity permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderEval {
    pub perm: Permutation,
    pub counts: PairCountMatrix,
}

impl LadderDiagram {
    pub fn new(n: StrandCount, edges: Vec<LadderEdge>) -> Result<Self, LadderError> {
        for e in &edges {
            e.check(n.get())?;
        }
        Ok(LadderDiagram { n, edges })
    }

    pub fn n(&self) -> StrandCount {
        self.n
    }

    pub fn edges(&self) -> &[LadderEdge] {
        &self.edges
    }

    pub fn eval(&self) -> LadderEval {
        eval_edges(self.n, &self.edges)
    }

    pub fn is_w_ladder(&self) -> bool {
        !self.edges.iter().any(|e| e.is_black())
    }

    pub fn to_projection_word(&self) -> Result<ProjectionWord, LadderError> {
        let mut letters = Vec::with_capacity(self.edges.len());
        for (at, e) in self.edges.iter().enumerate() {
            match *e {
                LadderEdge::White(k) => letters.push(k),
                LadderEdge::Black(..) => return Err(LadderError::BlackEdgePresent(at)),
            }
        }
        Ok(ProjectionWord::from_raw(self.n, letters))
    }

    pub fn from_word(w: &ProjectionWord) -> Self {
        LadderDiagram { n: w.n(), edges: w.raw().iter().map(|&k| LadderEdge::White(k)).collect() }
    }

    pub fn parse(n: StrandCount, text: &str) -> Result<Self, LadderError> {
        let edges = text.split_whitespace().map(str::parse).collect::<Result<Vec<_>, _>>()?;
        LadderDiagram::new(n, edges)
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        for index in 0..self.edges.len() {
            for id in MoveId::ALL {
                for dir in [Direction::Forward, Direction::Backward] {
                    let len = id.pattern_len(dir);
                    if index + len <= self.edges.len() && rewrite(id, dir, &self.edges[index..index + len]).is_some() {
                        out.push(Move { id, index, dir });
                    }
                }
            }
        }
        out
    }

    pub fn apply_move(&self, mv: Move) -> Result<LadderDiagram, LadderError> {
        let len = mv.id.pattern_len(mv.dir);
        let illegal = || LadderError::IllegalMove(mv.to_string());
        if mv.index + len > self.edges.len() {
            return Err(illegal());
        }
        let replacement = rewrite(mv.id, mv.dir, &self.edges[mv.index..mv.index + len]).ok_or_else(illegal)?;
        let mut edges = self.edges.clone();
        edges.splice(mv.index..mv.index + len, replacement);
        for e in &edges {
            e.check(self.n.get()).map_err(|_| illegal())?;
        }
        Ok(LadderDiagram { n: self.n, edges })
    }

    pub fn replay(&self, trace: &MoveTrace) -> Result<LadderDiagram, LadderError> {
        let mut d = self.clone();
        for step in &trace.steps {
            d = match step {
                TraceStep::Move(mv) => d.apply_move(*mv)?,
                TraceStep::Macro { name, index, len, replacement } => {
                    let bad = || LadderError::IllegalMove(format!("macro {name} at {index}"));
                    let block = d.edges.get(*index..index + len).ok_or_else(bad)?;
                    if eval_edges(d.n, block) != eval_edges(d.n, replacement) {
                        return Err(bad());
                    }
                    let mut edges = d.edges.clone();
                    edges.splice(*index..index + len, replacement.iter().copied());
                    LadderDiagram::new(d.n, edges)?
                }
            };
        }
        Ok(d)
    }
}

impl fmt::Display for LadderDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.edges.iter().map(LadderEdge::to_string).collect();
        f.write_str(&toks.join(" "))
    }
}

fn eval_edges(n: StrandCount, edges: &[LadderEdge]) -> LadderEval {
    let mut perm = Permutation::identity(n);
    let mut counts = PairCountMatrix::zero(n);
    for e in edges {
        match *e {
            LadderEdge::White(k) => {
                let k = k as usize;
                let (a, b) = (perm.label_at(k), perm.label_at(k + 1));
                counts.add(a, b, 1);
                counts.add(b, a, 1);
                perm.swap_adjacent(k);
            }
            LadderEdge::Black(i, j) => {
                let (a, b) = (perm.label_at(i as usize), perm.label_at(j as usize));
                counts.add(a, b, 2);
                counts.add(b, a, 2);
            }
        }
    }
    LadderEval { perm, counts }
}

/// B-ladder diagram of a (0,2)-mask, black edges sorted by `(i, j)`.
/// With `multiplicity`, pair `(i, j)` gets `multiplicity(i, j)` copies.
pub fn b_ladder_of(mask: &UpperMask, multiplicity: Option<&PairCountMatrix>) -> Result<LadderDiagram, LadderError> {
    let mut edges = Vec::with_capacity(mask.count());
    for (i, j) in mask.pairs() {
        let copies = match multiplicity {
            Some(m) => {
                let c = m.get(i, j);
                if c <= 0 {
                    return Err(LadderError::BadMultiplicity(i, j));
                }
                c as usize
            }
            None => 1,
        };
        edges.extend(std::iter::repeat_n(LadderEdge::Black(i as u8, j as u8), copies));
    }
    Ok(LadderDiagram { n: mask.n(), edges })
}

fn check_span(k: usize, l: usize, n: usize) -> Result<(), LadderError> {
    if 1 <= k && k < l && l <= n {
        Ok(())
    } else {
        Err(LadderError::IndexOutOfRange(format!("span {k}..{l}"), n))
    }
}

/// White-edge replacement for the black run `B(k,k+1) B(k,k+2) ... B(k,l)`.
pub fn btow_row(k: usize, l: usize, n: usize) -> Result<Vec<LadderEdge>, LadderError> {
    check_span(k, l, n)?;
    let up = (k..l).map(|p| LadderEdge::White(p as u8));
    let down = (k..l).rev().map(|p| LadderEdge::White(p as u8));
    Ok(up.chain(down).collect())
}

/// White-edge replacement for the black run `B(l-1,l) B(l-2,l) ... B(k,l)`.
pub fn btow_col(k: usize, l: usize, n: usize) -> Result<Vec<LadderEdge>, LadderError> {
    check_span(k, l, n)?;
    let down = (k..l).rev().map(|p| LadderEdge::White(p as u8));
    let up = (k..l).map(|p| LadderEdge::White(p as u8));
    Ok(down.chain(up).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveId {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
}

impl MoveId {
    pub const ALL: [MoveId; 9] =
        [MoveId::L1, MoveId::L2, MoveId::L3, MoveId::L4, MoveId::L5, MoveId::L6, MoveId::L7, MoveId::L8, MoveId::L9];

    /// Number of edges matched on the side the move is applied from.
    pub fn pattern_len(self, dir: Direction) -> usize {
        match (self, dir) {
            (MoveId::L1, Direction::Forward) => 1,
            (MoveId::L4, _) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for MoveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for MoveId {
    type Err = LadderError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MoveId::ALL.into_iter().find(|m| m.to_string() == s).ok_or_else(|| LadderError::Parse(s.to_string()))
    }
}

/// Forward rewrites the left-hand side of a move into its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub id: MoveId,
    pub index: usize,
    pub dir: Direction,
}

impl Move {
    /// The move undoing `self` on the rewritten diagram.
    pub fn inverse(self) -> Move {
        Move { dir: self.dir.flip(), ..self }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}:{}", self.id, self.index, self.dir.as_str())
    }
}

/// Rewrites `window` by move `id` in direction `dir`, or `None` if the
/// pattern or its side condition does not match.
fn rewrite(id: MoveId, dir: Direction, window: &[LadderEdge]) -> Option<Vec<LadderEdge>> {
    use Direction::*;
    use LadderEdge::{Black as B, White as W};
    let out = match (id, dir, window) {
        (MoveId::L1, Forward, &[B(i, j)]) if j == i + 1 => vec![W(i), W(i)],
        (MoveId::L1, Backward, &[W(k), W(l)]) if k == l => vec![B(k, k + 1)],
        (MoveId::L2, _, &[a @ B(..), b @ B(..)]) if a != b => vec![b, a],
        (MoveId::L3, _, &[a @ W(k), b @ W(l)]) if k + 1 < l || l + 1 < k => vec![b, a],
        (MoveId::L4, Forward, &[W(a), W(b), W(c)]) if a == c && b == a + 1 => vec![W(b), W(a), W(b)],
        (MoveId::L4, Backward, &[W(a), W(b), W(c)]) if a == c && a == b + 1 => vec![W(b), W(a), W(b)],
        (MoveId::L5, Forward, &[b @ B(..), w @ W(_)]) if commutes(b, w) => vec![w, b],
        (MoveId::L5, Backward, &[w @ W(_), b @ B(..)]) if commutes(b, w) => vec![b, w],
        (MoveId::L6, Forward, &[B(i, j), W(k)]) if k == i && i + 1 < j => vec![W(i), B(i + 1, j)],
        (MoveId::L6, Backward, &[W(k), B(i, j)]) if i == k + 1 => vec![B(k, j), W(k)],
        (MoveId::L7, Forward, &[W(k), B(i, j)]) if k == i && i + 1 < j => vec![B(i + 1, j), W(i)],
        (MoveId::L7, Backward, &[B(i, j), W(k)]) if i == k + 1 => vec![W(k), B(k, j)],
        (MoveId::L8, Forward, &[B(i, j), W(k)]) if k + 1 == j && i + 1 < j => vec![W(k), B(i, k)],
        (MoveId::L8, Backward, &[W(k), B(i, j)]) if j == k => vec![B(i, k + 1), W(k)],
        (MoveId::L9, Forward, &[W(k), B(i, j)]) if k + 1 == j && i + 1 < j => vec![B(i, k), W(k)],
        (MoveId::L9, Backward, &[B(i, j), W(k)]) if j == k => vec![W(k), B(i, k + 1)],
        _ => return None,
    };
    Some(out)
}

/// One step of a rewrite: a single ladder move, or a macro that swaps a block
/// of edges for another block with the same evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStep {
    Move(Move),
    Macro { name: String, index: usize, len: usize, replacement: Vec<LadderEdge> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MoveTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    #[serde(rename = "move")]
    mv: String,
    index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<String>,
}

impl MoveTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let reprs: Vec<StepRepr> = self
            .steps
            .iter()
            .map(|s| match s {
                TraceStep::Move(m) => StepRepr {
                    mv: m.id.to_string(),
                    index: m.index,
                    dir: Some(m.dir.as_str().to_string()),
                    name: None,
                    len: None,
                    edges: None,
                },
                TraceStep::Macro { name, index, len, replacement } => StepRepr {
                    mv: "macro".to_string(),
                    index: *index,
                    dir: None,
                    name: Some(name.clone()),
                    len: Some(*len),
                    edges: Some(replacement.iter().map(LadderEdge::to_string).collect::<Vec<_>>().join(" ")),
                },
            })
            .collect();
        serde_json::to_value(reprs).expect("trace serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LadderError> {
        let reprs: Vec<StepRepr> = serde_json::from_value(v.clone()).map_err(|e| LadderError::Parse(e.to_string()))?;
        let steps = reprs
            .into_iter()
            .map(|r| {
                if r.mv == "macro" {
                    let replacement = r.edges.unwrap_or_default().split_whitespace().map(str::parse).collect::<Result<
                        Vec<_>,
                        _,
                    >>(
                    )?;
                    Ok(TraceStep::Macro {
                        name: r.name.unwrap_or_default(),
                        index: r.index,
                        len: r.len.unwrap_or(0),
                        replacement,
                    })
                } else {
                    let dir = match r.dir.as_deref() {
                        Some("backward") => Direction::Backward,
                        Some("forward") | None => Direction::Forward,
                        Some(other) => return Err(LadderError::Parse(other.to_string())),
                    };
                    Ok(TraceStep::Move(Move { id: r.mv.parse()?, index: r.index, dir }))
                }
            })
            .collect::<Result<Vec<_>, LadderError>>()?;
        Ok(MoveTrace { steps })
    }
}

/// Order of indices giving the lexicographically least linearization of the
/// trace of `edges`.
fn normal_form_order(edges: &[LadderEdge]) -> Vec<usize> {
    let len = edges.len();
    let mut blockers = vec![0usize; len];
    for b in 0..len {
        blockers[b] = (0..b).filter(|&a| !commutes(edges[a], edges[b])).count();
    }
    let mut done = vec![false; len];
    let mut order = Vec::with_capacity(len);
    for _ in 0..len {
        let pick = (0..len)
            .filter(|&x| !done[x] && blockers[x] == 0)
            .min_by_key(|&x| (edges[x], x))
            .expect("a trace always has a minimal element");
        done[pick] = true;
        order.push(pick);
        for y in pick + 1..len {
            if !done[y] && !commutes(edges[pick], edges[y]) {
                blockers[y] -= 1;
            }
        }
    }
    order
}

/// Rearranges `edges` by commutations so that `positions` (ascending) become
/// contiguous, returning the new index order, or `None` if impossible.
fn gather_order(edges: &[LadderEdge], positions: &[usize]) -> Option<Vec<usize>> {
    let (first, last) = (positions[0], *positions.last()?);
    let mut before = Vec::new();
    let mut after = Vec::new();
    let mut p = 1;
    for x in first + 1..last {
        if positions.get(p) == Some(&x) {
            p += 1;
            continue;
        }
        let e = edges[x];
        let depends = positions[..p].iter().any(|&q| !commutes(edges[q], e))
            || after.iter().any(|&a: &usize| !commutes(edges[a], e));
        if depends {
            if positions[p..].iter().any(|&q| !commutes(edges[q], e)) {
                return None;
            }
            after.push(x);
        } else {
            before.push(x);
        }
    }
    let mut order: Vec<usize> = (0..first).collect();
    order.extend(before);
    order.extend_from_slice(positions);
    order.extend(after);
    order.extend(last + 1..edges.len());
    Some(order)
}

/// Commutation moves taking `edges` to the arrangement `order`.
fn commutation_steps(edges: &[LadderEdge], order: &[usize], steps: &mut Vec<TraceStep>) -> Vec<LadderEdge> {
    let mut current: Vec<usize> = (0..edges.len()).collect();
    for (t, &want) in order.iter().enumerate() {
        let mut s = current.iter().position(|&x| x == want).expect("order is a permutation");
        while s > t {
            let (a, b) = (edges[current[s - 1]], edges[current[s]]);
            debug_assert!(commutes(a, b));
            let (id, dir) = match (a, b) {
                (LadderEdge::Black(..), LadderEdge::Black(..)) => (MoveId::L2, Direction::Forward),
                (LadderEdge::White(_), LadderEdge::White(_)) => (MoveId::L3, Direction::Forward),
                (LadderEdge::Black(..), LadderEdge::White(_)) => (MoveId::L5, Direction::Forward),
                (LadderEdge::White(_), LadderEdge::Black(..)) => (MoveId::L5, Direction::Backward),
            };
            if a != b {
                steps.push(TraceStep::Move(Move { id, index: s - 1, dir }));
            }
            current.swap(s - 1, s);
            s -= 1;
        }
    }
    order.iter().map(|&x| edges[x]).collect()
}

/// Source of macro rewrites for the search: given the black edges present,
/// proposes groups of them together with a white replacement block.
pub trait MacroSource: Sync {
    fn propose(&self, n: StrandCount, blacks: &[(usize, LadderEdge)]) -> Vec<MacroCandidate>;
}

#[derive(Debug, Clone)]
pub struct MacroCandidate {
    pub name: String,
    /// Indices into the `blacks` slice given to [`MacroSource::propose`].
    pub members: Vec<usize>,
    pub replacement: Vec<LadderEdge>,
}

/// The row and column runs of black edges replaced by their white forms.
pub struct BtowMacros;

impl MacroSource for BtowMacros {
    fn propose(&self, n: StrandCount, blacks: &[(usize, LadderEdge)]) -> Vec<MacroCandidate> {
        let n = n.get();
        let find = |i: usize, j: usize| blacks.iter().position(|&(_, e)| e == LadderEdge::Black(i as u8, j as u8));
        let mut out = Vec::new();
        for k in 1..=n {
            for l in k + 2..=n {
                if let Some(members) = (k + 1..=l).map(|j| find(k, j)).collect::<Option<Vec<_>>>() {
                    out.push(MacroCandidate {
                        name: format!("btow-row {k} {l}"),
                        members,
                        replacement: btow_row(k, l, n).expect("span checked"),
                    });
                }
                if let Some(members) = (k..l).map(|i| find(i, l)).collect::<Option<Vec<_>>>() {
                    out.push(MacroCandidate {
                        name: format!("btow-col {k} {l}"),
                        members,
                        replacement: btow_col(k, l, n).expect("span checked"),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub diagram: LadderDiagram,
    pub trace: MoveTrace,
    pub nodes: usize,
}

#[derive(Clone)]
enum Action {
    Root,
    Rule { positions: Vec<usize>, id: MoveId, dir: Direction },
    Macro { positions: Vec<usize>, name: String, replacement: Vec<LadderEdge> },
}

struct Node {
    seq: Vec<LadderEdge>,
    parent: usize,
    action: Action,
}

/// Looks for a W-ladder reachable from `d` by ladder moves, using the row and
/// column macros. `Ok(None)` means the reachable space was exhausted.
pub fn search_w_form(d: &LadderDiagram, budget: usize) -> Result<Option<SearchOutcome>, LadderError> {
    search_w_form_with(d, budget, &BtowMacros)
}

pub fn search_w_form_with(
    d: &LadderDiagram,
    budget: usize,
    macros: &dyn MacroSource,
) -> Result<Option<SearchOutcome>, LadderError> {
    let n = d.n;
    let root_order = normal_form_order(&d.edges);
    let root_seq: Vec<LadderEdge> = root_order.iter().map(|&x| d.edges[x]).collect();
    let mut nodes = vec![Node { seq: root_seq.clone(), parent: usize::MAX, action: Action::Root }];
    let mut seen: HashSet<Vec<LadderEdge>> = HashSet::from([root_seq.clone()]);
    let mut heap = BinaryHeap::new();
    let h = |s: &[LadderEdge]| s.iter().map(|e| e.weight()).sum::<usize>();
    heap.push(Reverse((h(&root_seq), 0usize, 0usize)));
    let mut expanded = 0usize;

    while let Some(Reverse((_, depth, id))) = heap.pop() {
        if nodes[id].seq.iter().all(|e| !e.is_black()) {
            let (diagram, trace) = reconstruct(d, &nodes, id);
            return Ok(Some(SearchOutcome { diagram, trace, nodes: expanded }));
        }
        if expanded >= budget {
            return Err(LadderError::BudgetExhausted(budget));
        }
        expanded += 1;
        let seq = nodes[id].seq.clone();
        for (action, child) in successors(n, &seq, macros) {
            let order = normal_form_order(&child);
            let key: Vec<LadderEdge> = order.iter().map(|&x| child[x]).collect();
            if seen.insert(key.clone()) {
                let score = h(&key);
                nodes.push(Node { seq: key, parent: id, action });
                heap.push(Reverse((score, depth + 1, nodes.len() - 1)));
            }
        }
    }
    Ok(None)
}

fn apply_action(
    n: StrandCount,
    seq: &[LadderEdge],
    action: &Action,
    steps: Option<&mut Vec<TraceStep>>,
) -> Vec<LadderEdge> {
    let positions = match action {
        Action::Root => return seq.to_vec(),
        Action::Rule { positions, .. } | Action::Macro { positions, .. } => positions,
    };
    let order = gather_order(seq, positions).expect("action positions were gathered before");
    let mut scratch = Vec::new();
    let steps = steps.unwrap_or(&mut scratch);
    let arranged = commutation_steps(seq, &order, steps);
    let start = order.iter().position(|&x| x == positions[0]).expect("present");
    let len = positions.len();
    let replacement = match action {
        Action::Rule { id, dir, .. } => {
            steps.push(TraceStep::Move(Move { id: *id, index: start, dir: *dir }));
            rewrite(*id, *dir, &arranged[start..start + len]).expect("rule matched")
        }
        Action::Macro { name, replacement, .. } => {
            steps.push(TraceStep::Macro { name: name.clone(), index: start, len, replacement: replacement.clone() });
            replacement.clone()
        }
        Action::Root => unreachable!(),
    };
    let _ = n;
    let mut out = arranged;
    out.splice(start..start + len, replacement);
    out
}

fn successors(n: StrandCount, seq: &[LadderEdge], macros: &dyn MacroSource) -> Vec<(Action, Vec<LadderEdge>)> {
    use LadderEdge::{Black as B, White as W};
    let mut out = Vec::new();
    let mut push = |action: Action| {
        let child = apply_action(n, seq, &action, None);
        out.push((action, child));
    };
    let len = seq.len();
    for (p, &e) in seq.iter().enumerate() {
        if let B(i, j) = e {
            if j == i + 1 {
                push(Action::Rule { positions: vec![p], id: MoveId::L1, dir: Direction::Forward });
            }
        }
    }
    for p in 0..len {
        for q in p + 1..len {
            let pair = [seq[p], seq[q]];
            let rules: &[(MoveId, Direction)] = match pair {
                [B(..), W(_)] => &[
                    (MoveId::L6, Direction::Forward),
                    (MoveId::L8, Direction::Forward),
                    (MoveId::L7, Direction::Backward),
                    (MoveId::L9, Direction::Backward),
                ],
                [W(_), B(..)] => &[
                    (MoveId::L7, Direction::Forward),
                    (MoveId::L9, Direction::Forward),
                    (MoveId::L6, Direction::Backward),
                    (MoveId::L8, Direction::Backward),
                ],
                [W(a), W(b)] if a == b => &[(MoveId::L1, Direction::Backward)],
                _ => &[],
            };
            let matching: Vec<_> = rules.iter().filter(|(id, dir)| rewrite(*id, *dir, &pair).is_some()).collect();
            if matching.is_empty() || gather_order(seq, &[p, q]).is_none() {
                continue;
            }
            for &&(id, dir) in &matching {
                push(Action::Rule { positions: vec![p, q], id, dir });
            }
        }
    }
    for p in 0..len {
        let W(a) = seq[p] else { continue };
        for q in p + 1..len {
            let W(b) = seq[q] else { continue };
            if a.abs_diff(b) != 1 {
                continue;
            }
            for r in q + 1..len {
                if seq[r] != W(a) {
                    continue;
                }
                let dir = if b == a + 1 { Direction::Forward } else { Direction::Backward };
                if gather_order(seq, &[p, q, r]).is_some() {
                    push(Action::Rule { positions: vec![p, q, r], id: MoveId::L4, dir });
                }
            }
        }
    }
    let blacks: Vec<(usize, LadderEdge)> = seq.iter().copied().enumerate().filter(|(_, e)| e.is_black()).collect();
    for cand in macros.propose(n, &blacks) {
        let mut positions: Vec<usize> = cand.members.iter().map(|&m| blacks[m].0).collect();
        positions.sort_unstable();
        positions.dedup();
        if positions.len() != cand.members.len() || gather_order(seq, &positions).is_none() {
            continue;
        }
        push(Action::Macro { positions, name: cand.name, replacement: cand.replacement });
    }
    out
}

fn reconstruct(d: &LadderDiagram, nodes: &[Node], goal: usize) -> (LadderDiagram, MoveTrace) {
    let mut path = Vec::new();
    let mut at = goal;
    while at != 0 {
        path.push(at);
        at = nodes[at].parent;
    }
    path.reverse();
    let mut steps = Vec::new();
    let mut current = commutation_steps(&d.edges, &normal_form_order(&d.edges), &mut steps);
    for id in path {
        let after = apply_action(d.n, &current, &nodes[id].action, Some(&mut steps));
        current = commutation_steps(&after, &normal_form_order(&after), &mut steps);
    }
    (LadderDiagram { n: d.n, edges: current }, MoveTrace { steps })
}
