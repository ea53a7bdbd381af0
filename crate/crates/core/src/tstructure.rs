//! Graphs on the grid alignment of a (0,2)-mask and T-structure detection.
//!
//! Vertex `V(i,j)` sits at mask pair `(i,j)`. A horizontal edge joins
//! `V(i,j)` to `V(i,k)` with `k < j` (its left partner); a vertical edge joins
//! `V(i,j)` to `V(l,j)` with `l > i` (its partner below).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::StrandCount;
use crate::matrix::{enumerate_t0, MatrixError, UpperMask};
use crate::par::{map_collect, Exec};

pub type Vertex = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TStructureError {
    #[error("vertex V({0},{1}) is not in the grid")]
    VertexNotFound(usize, usize),
    #[error("edge V({0},{1})-V({2},{3}) breaks the graph rules")]
    InvalidEdge(usize, usize, usize, usize),
    #[error("cannot parse graph: {0}")]
    Parse(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph {
    mask: UpperMask,
    /// `V(i,j)` -> `k` for the edge to `V(i,k)`.
    left: BTreeMap<Vertex, usize>,
    /// `V(i,j)` -> `l` for the edge to `V(l,j)`.
    down: BTreeMap<Vertex, usize>,
}

impl GridGraph {
    /// The alignment of `mask` with no edges.
    pub fn alignment(mask: &UpperMask) -> Self {
        GridGraph { mask: *mask, left: BTreeMap::new(), down: BTreeMap::new() }
    }

    /// Builds a graph from horizontal edges `((i,j),(i,k))` and vertical
    /// edges `((i,j),(l,j))`, given in either orientation.
    pub fn new(
        mask: &UpperMask,
        hedges: &[(Vertex, Vertex)],
        vedges: &[(Vertex, Vertex)],
    ) -> Result<Self, TStructureError> {
        let mut g = GridGraph::alignment(mask);
        for &(a, b) in hedges {
            let bad = TStructureError::InvalidEdge(a.0, a.1, b.0, b.1);
            let (right, left) = if a.1 > b.1 { (a, b) } else { (b, a) };
            if right.0 != left.0 || right.1 == left.1 {
                return Err(bad);
            }
            g.require(right)?;
            g.require(left)?;
            if g.left.insert(right, left.1).is_some() {
                return Err(bad);
            }
        }
        for &(a, b) in vedges {
            let bad = TStructureError::InvalidEdge(a.0, a.1, b.0, b.1);
            let (top, below) = if a.0 < b.0 { (a, b) } else { (b, a) };
            if top.1 != below.1 || top.0 == below.0 {
                return Err(bad);
            }
            g.require(top)?;
            g.require(below)?;
            if g.down.insert(top, below.0).is_some() {
                return Err(bad);
            }
        }
        Ok(g)
    }

    fn require(&self, v: Vertex) -> Result<(), TStructureError> {
        if v.0 >= 1 && v.0 < v.1 && v.1 <= self.mask.n().get() && self.mask.contains(v.0, v.1) {
            Ok(())
        } else {
            Err(TStructureError::VertexNotFound(v.0, v.1))
        }
    }

    pub fn mask(&self) -> &UpperMask {
        &self.mask
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.mask.pairs().collect()
    }

    pub fn hedges(&self) -> Vec<(Vertex, Vertex)> {
        self.left.iter().map(|(&(i, j), &k)| ((i, j), (i, k))).collect()
    }

    pub fn vedges(&self) -> Vec<(Vertex, Vertex)> {
        self.down.iter().map(|(&(i, j), &l)| ((i, j), (l, j))).collect()
    }

    pub fn left_of(&self, v: Vertex) -> Option<Vertex> {
        self.left.get(&v).map(|&k| (v.0, k))
    }

    pub fn below(&self, v: Vertex) -> Option<Vertex> {
        self.down.get(&v).map(|&l| (l, v.1))
    }

    /// Lengths of the horizontal and vertical paths starting at `v`.
    pub fn paths(&self, v: Vertex) -> Result<(usize, usize), TStructureError> {
        self.require(v)?;
        let mut h = 0;
        let mut at = v;
        while let Some(next) = self.left_of(at) {
            h += 1;
            at = next;
        }
        let mut m = 0;
        let mut at = v;
        while let Some(next) = self.below(at) {
            m += 1;
            at = next;
        }
        Ok((h, m))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |v: Vertex| [v.0, v.1];
        serde_json::json!({
            "n": self.mask.n().get(),
            "vertices": self.vertices().into_iter().map(pair).collect::<Vec<_>>(),
            "hedges": self.hedges().into_iter().map(|(a, b)| [pair(a), pair(b)]).collect::<Vec<_>>(),
            "vedges": self.vedges().into_iter().map(|(a, b)| [pair(a), pair(b)]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, TStructureError> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            vertices: Vec<[usize; 2]>,
            hedges: Vec<[[usize; 2]; 2]>,
            vedges: Vec<[[usize; 2]; 2]>,
        }
        let r: Repr = serde_json::from_value(v.clone()).map_err(|e| TStructureError::Parse(e.to_string()))?;
        let n = StrandCount::new(r.n).map_err(|e| TStructureError::Parse(e.to_string()))?;
        let mask = UpperMask::from_pairs(n, r.vertices.iter().map(|p| (p[0], p[1])))?;
        let edges = |list: &[[[usize; 2]; 2]]| -> Vec<(Vertex, Vertex)> {
            list.iter().map(|e| ((e[0][0], e[0][1]), (e[1][0], e[1][1]))).collect()
        };
        GridGraph::new(&mask, &edges(&r.hedges), &edges(&r.vedges))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct C1Failure {
    pub vertex: Vertex,
    pub horizontal: usize,
    pub vertical: usize,
    pub required: usize,
}

/// A corner `V(i,j)` with left partner `V(i,k)` and lower partner `V(l,j)`
/// whose square is not closed as C2 or C3 demands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareFailure {
    pub corner: Vertex,
    pub left: Vertex,
    pub below: Vertex,
    /// The third edge's far end: `V(m,k)` for C2, `V(l,m)` for C3.
    pub third: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TReport {
    pub c1: Vec<C1Failure>,
    pub c2: Vec<SquareFailure>,
    pub c3: Vec<SquareFailure>,
}

impl TReport {
    pub fn c1_holds(&self) -> bool {
        self.c1.is_empty()
    }

    pub fn c2_holds(&self) -> bool {
        self.c2.is_empty()
    }

    pub fn c3_holds(&self) -> bool {
        self.c3.is_empty()
    }

    pub fn is_t_structure(&self) -> bool {
        self.c1_holds() && self.c2_holds() && self.c3_holds()
    }
}

/// C2 at corner `v`: the left partner's lower edge must end in the same row
/// as `v`'s, and that row must carry the closing horizontal edge.
fn c2_failure(g: &GridGraph, v: Vertex) -> Option<SquareFailure> {
    let left = g.left_of(v)?;
    let below = g.below(v)?;
    let third = g.below(left)?;
    let closed = third.0 == below.0 && g.left_of(below) == Some(third);
    (!closed).then_some(SquareFailure { corner: v, left, below, third })
}

/// C3 at corner `v`: the lower partner's left edge must end in `v`'s left
/// partner's column, and that column must carry the closing vertical edge.
fn c3_failure(g: &GridGraph, v: Vertex) -> Option<SquareFailure> {
    let left = g.left_of(v)?;
    let below = g.below(v)?;
    let third = g.left_of(below)?;
    let closed = third.1 == left.1 && g.below(left) == Some(third);
    (!closed).then_some(SquareFailure { corner: v, left, below, third })
}

pub fn check_t_structure(g: &GridGraph) -> TReport {
    let mut report = TReport::default();
    for v in g.vertices() {
        let (h, m) = g.paths(v).expect("vertex of the graph");
        let required = v.1 - v.0 - 1;
        if h + m != required {
            report.c1.push(C1Failure { vertex: v, horizontal: h, vertical: m, required });
        }
        report.c2.extend(c2_failure(g, v));
        report.c3.extend(c3_failure(g, v));
    }
    report
}

/// Backtracking search for a graph on the alignment of `mask` with a
/// T-structure. Rows are handled from the bottom up and each row from left
/// to right, so every path a vertex reaches is final when it is assigned and
/// C1-C3 are checked immediately.
pub fn find_t_structure(mask: &UpperMask) -> Option<GridGraph> {
    let mut order: Vec<Vertex> = mask.pairs().collect();
    order.sort_by_key(|&(i, j)| (std::cmp::Reverse(i), j));
    let mut g = GridGraph::alignment(mask);
    let mut hlen: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut vlen: BTreeMap<Vertex, usize> = BTreeMap::new();
    assign(&order, 0, &mut g, &mut hlen, &mut vlen).then_some(g)
}

fn assign(
    order: &[Vertex],
    at: usize,
    g: &mut GridGraph,
    hlen: &mut BTreeMap<Vertex, usize>,
    vlen: &mut BTreeMap<Vertex, usize>,
) -> bool {
    let Some(&v) = order.get(at) else { return true };
    let (i, j) = v;
    let required = j - i - 1;
    let lefts: Vec<Option<usize>> =
        std::iter::once(None).chain((i + 1..j).rev().filter(|&k| g.mask.contains(i, k)).map(Some)).collect();
    let downs: Vec<Option<usize>> =
        std::iter::once(None).chain((i + 1..j).filter(|&l| g.mask.contains(l, j)).map(Some)).collect();
    for &left in &lefts {
        let h = left.map_or(0, |k| 1 + hlen[&(i, k)]);
        if h > required {
            continue;
        }
        for &down in &downs {
            let m = down.map_or(0, |l| 1 + vlen[&(l, j)]);
            if h + m != required {
                continue;
            }
            if let Some(k) = left {
                g.left.insert(v, k);
            }
            if let Some(l) = down {
                g.down.insert(v, l);
            }
            if c2_failure(g, v).is_none() && c3_failure(g, v).is_none() {
                hlen.insert(v, h);
                vlen.insert(v, m);
                if assign(order, at + 1, g, hlen, vlen) {
                    return true;
                }
                hlen.remove(&v);
                vlen.remove(&v);
            }
            g.left.remove(&v);
            g.down.remove(&v);
        }
    }
    false
}

/// At most one set pair on each diagonal `j - i = d` with `d >= 3`.
pub fn one_per_long_diagonal(mask: &UpperMask) -> bool {
    let mut seen = [false; 128];
    for (i, j) in mask.pairs() {
        let d = j - i;
        if d >= 3 {
            if seen[d] {
                return false;
            }
            seen[d] = true;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub mask: String,
    pub one_per_diagonal: bool,
    pub has_t_structure: bool,
}

/// T-structure status of every T0 mask on `n` strands.
pub fn census(n: usize, exec: Exec) -> Result<Vec<CensusRow>, TStructureError> {
    let masks = enumerate_t0(n)?;
    Ok(map_collect(&masks, exec, |m| CensusRow {
        mask: m.to_pair_list(),
        one_per_diagonal: one_per_long_diagonal(m),
        has_t_structure: find_t_structure(m).is_some(),
    }))
}
