//! Realization of CN, OU and crossing matrices, with certificates that an
//! independent checker can confirm from the witness word alone.
//!
//! A (0,2)-mask is realized by the first layer that succeeds:
//!
//! 1. `window`: the support lies in a strand window narrower than `n`, so the
//!    problem is solved on fewer strands and embedded.
//! 2. `band`: every set pair has `j - i <= 2`.
//! 3. `peel`: a formation, window or band piece is split off, the remainder
//!    stays T0 and is realized the same way; the two pure words are stacked.
//! 4. `ladder`: search on the B-ladder diagram with formation macros.
//! 5. `dfs`: depth-first search over projection words within the pair budget.
//!
//! Entries above 2 are restored afterwards by repeating one crossing of the
//! pair an odd number of times.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, RwLock};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::braid::{BraidError, DiagramWord, Over, PairCountMatrix, Permutation, ProjectionWord, StrandCount};
use crate::formations::{self, all_descriptors, detect, insert_hook, FormationDescriptor};
use crate::ladder::{self, b_ladder_of, LadderEdge, MacroCandidate, MacroSource};
use crate::matrix::{check_sym_even, enumerate_t0, m02, pair_index, t0_violation, MatrixError, T0Violation, UpperMask};
use crate::par::{map_collect, Exec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("matrix is not T0: {0}")]
    NotT0(T0Violation),
    #[error("M + M^T is odd at ({0},{1})")]
    SumNotEven(usize, usize),
    #[error("M + M^T is not T0: {0}")]
    SumNotT0(T0Violation),
    #[error("no realization found for {0}")]
    RealizationFailed(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertKind {
    Cn,
    Ou,
    Crossing,
}

impl std::str::FromStr for CertKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cn" => Ok(CertKind::Cn),
            "ou" => Ok(CertKind::Ou),
            "crossing" => Ok(CertKind::Crossing),
            _ => Err(format!("unknown certificate kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Projection(ProjectionWord),
    Diagram(DiagramWord),
}

/// How a (0,2)-mask was realized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum Plan {
    Empty,
    Window { first: usize, last: usize, inner: Arc<Plan> },
    Band { pairs: String },
    Formation { descriptor: String },
    Peel { leaf: Arc<Plan>, rest: Arc<Plan> },
    Ladder { nodes: usize, steps: usize },
    Dfs { nodes: usize },
}

impl Plan {
    /// Name of the layer that closed the mask.
    pub fn layer(&self) -> &'static str {
        match self {
            Plan::Empty => "empty",
            Plan::Window { .. } => "window",
            Plan::Band { .. } => "band",
            Plan::Formation { .. } => "formation",
            Plan::Peel { .. } => "peel",
            Plan::Ladder { .. } => "ladder",
            Plan::Dfs { .. } => "dfs",
        }
    }

    /// Search nodes spent anywhere in the plan.
    pub fn nodes(&self) -> usize {
        match self {
            Plan::Window { inner, .. } => inner.nodes(),
            Plan::Peel { leaf, rest } => leaf.nodes() + rest.nodes(),
            Plan::Ladder { nodes, .. } | Plan::Dfs { nodes } => *nodes,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertKind,
    pub target: PairCountMatrix,
    pub witness: Witness,
    pub method: serde_json::Value,
    pub verified: bool,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        let witness = match &self.witness {
            Witness::Projection(w) => w.to_string(),
            Witness::Diagram(d) => d.to_string(),
        };
        serde_json::json!({
            "kind": self.kind,
            "target": self.target.to_json(),
            "witness": witness,
            "method": self.method,
            "verified": self.verified,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, RealizeError> {
        let bad = |what: &str| RealizeError::Braid(BraidError::BadToken(what.to_string()));
        let kind: CertKind = v["kind"].as_str().ok_or_else(|| bad("kind"))?.parse().map_err(|_| bad("kind"))?;
        let target = PairCountMatrix::from_json(&v["target"])?;
        let text = v["witness"].as_str().ok_or_else(|| bad("witness"))?;
        let witness = match kind {
            CertKind::Cn => Witness::Projection(ProjectionWord::parse(target.n(), text)?),
            _ => Witness::Diagram(DiagramWord::parse(target.n(), text)?),
        };
        Ok(Certificate {
            kind,
            target,
            witness,
            method: v.get("method").cloned().unwrap_or(serde_json::Value::Null),
            verified: v["verified"].as_bool().unwrap_or(false),
        })
    }
}

/// Recomputes the witness's matrix and side conditions from scratch. The
/// method tag and the stored `verified` flag are ignored.
pub fn verify_certificate(c: &Certificate) -> bool {
    match (&c.kind, &c.witness) {
        (CertKind::Cn, Witness::Projection(w)) => {
            w.n() == c.target.n() && check_sym_even(&c.target).is_ok() && w.is_pure() && w.cn_matrix() == c.target
        }
        (CertKind::Ou, Witness::Diagram(d)) => d.n() == c.target.n() && d.is_pure() && d.ou_matrix() == c.target,
        (CertKind::Crossing, Witness::Diagram(d)) => {
            d.n() == c.target.n()
                && d.is_pure()
                && d.is_positive()
                && d.crossing_matrix() == c.target
                && d.ou_matrix() == c.target
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizerOptions {
    /// Node budget of the ladder-search layer.
    pub ladder_budget: usize,
    /// Node budget of the word-search layer.
    pub dfs_budget: usize,
}

impl Default for RealizerOptions {
    fn default() -> Self {
        RealizerOptions { ladder_budget: 20_000, dfs_budget: ladder::DEFAULT_BUDGET }
    }
}

impl RealizerOptions {
    /// Defaults, with both budgets taken from `BRAIDMAT_BUDGET` when set.
    pub fn from_env() -> Self {
        let mut o = RealizerOptions::default();
        if let Some(b) = std::env::var("BRAIDMAT_BUDGET").ok().and_then(|s| s.parse().ok()) {
            o.ladder_budget = b;
            o.dfs_budget = b;
        }
        o
    }
}

#[derive(Debug, Clone)]
struct Realized {
    word: Arc<Vec<u8>>,
    plan: Arc<Plan>,
}

type Memo = RwLock<HashMap<UpperMask, Option<Realized>>>;

/// Realization engine with memo tables shared between calls and threads.
#[derive(Debug, Default)]
pub struct Realizer {
    options: RealizerOptions,
    /// Results of the full pipeline.
    full: Memo,
    /// Results of the window/band/peel layers only.
    cheap: Memo,
}

fn lookup(memo: &Memo, mask: &UpperMask) -> Option<Option<Realized>> {
    memo.read().expect("memo lock").get(mask).cloned()
}

fn publish(memo: &Memo, mask: UpperMask, r: Option<Realized>) {
    memo.write().expect("memo lock").entry(mask).or_insert(r);
}

fn word_fits(mask: &UpperMask, letters: &[u8]) -> bool {
    let w = ProjectionWord::from_raw(mask.n(), letters.to_vec());
    w.is_pure() && w.cn_matrix() == mask.to_matrix()
}

/// Word for a mask whose pairs all have `j - i <= 2`: adjacent pairs become
/// `i i`, then each distance-two pair is hooked in where its strands meet.
pub fn band_word(mask: &UpperMask) -> Option<Vec<u8>> {
    if mask.bandwidth() > 2 || !mask.is_t0() {
        return None;
    }
    let n = mask.n().get();
    let mut w: Vec<usize> = Vec::new();
    for i in 1..n {
        if mask.contains(i, i + 1) {
            w.extend([i, i]);
        }
    }
    for i in 1..n.saturating_sub(1) {
        if mask.contains(i, i + 2) {
            w = insert_hook(n, &w, i, i + 2)?;
        }
    }
    Some(w.into_iter().map(|k| k as u8).collect())
}

/// Macro source offering every formation that fits under the current black
/// edges, replaced by its realizing word.
pub struct FormationMacros;

impl MacroSource for FormationMacros {
    fn propose(&self, n: StrandCount, blacks: &[(usize, LadderEdge)]) -> Vec<MacroCandidate> {
        let mut mask = UpperMask::empty(n);
        let mut slot = HashMap::new();
        for (at, &(_, e)) in blacks.iter().enumerate() {
            if let LadderEdge::Black(i, j) = e {
                mask.insert(i as usize, j as usize);
                slot.entry((i as usize, j as usize)).or_insert(at);
            }
        }
        let Ok(all) = all_descriptors(n) else { return Vec::new() };
        all.iter()
            .filter(|(_, m)| m.count() >= 2 && m.is_subset_of(&mask))
            .filter_map(|(f, m)| {
                let word = formations::realize(f).ok()?;
                Some(MacroCandidate {
                    name: f.to_string(),
                    members: m.pairs().map(|p| slot[&p]).collect(),
                    replacement: word.letters().map(|k| LadderEdge::White(k as u8)).collect(),
                })
            })
            .collect()
    }
}

impl Realizer {
    pub fn new(options: RealizerOptions) -> Self {
        Realizer { options, ..Default::default() }
    }

    pub fn options(&self) -> RealizerOptions {
        self.options
    }

    /// Realizes a T0 (0,2)-mask; returns the word and how it was found.
    pub fn realize_mask(&self, mask: &UpperMask) -> Option<(ProjectionWord, Arc<Plan>)> {
        let r = self.full(mask)?;
        Some((ProjectionWord::from_raw(mask.n(), r.word.to_vec()), r.plan))
    }

    fn full(&self, mask: &UpperMask) -> Option<Realized> {
        if let Some(r) = lookup(&self.full, mask) {
            return r;
        }
        let r = self.cheap(mask).or_else(|| self.ladder_layer(mask)).or_else(|| self.dfs_layer(mask));
        publish(&self.full, *mask, r.clone());
        r
    }

    fn cheap(&self, mask: &UpperMask) -> Option<Realized> {
        if let Some(r) = lookup(&self.cheap, mask) {
            return r;
        }
        if let Some(Some(r)) = lookup(&self.full, mask) {
            return Some(r);
        }
        let r = self.cheap_uncached(mask);
        publish(&self.cheap, *mask, r.clone());
        r
    }

    fn cheap_uncached(&self, mask: &UpperMask) -> Option<Realized> {
        if !mask.is_t0() {
            return None;
        }
        if mask.is_empty() {
            return Some(Realized { word: Arc::new(Vec::new()), plan: Arc::new(Plan::Empty) });
        }
        if let Some(r) = self.window_layer(mask) {
            return Some(r);
        }
        if let Some(word) = band_word(mask) {
            return Some(Realized { word: Arc::new(word), plan: Arc::new(Plan::Band { pairs: mask.to_pair_list() }) });
        }
        self.peel_layer(mask)
    }

    fn window_layer(&self, mask: &UpperMask) -> Option<Realized> {
        let (first, last) = mask.support_window()?;
        let width = last - first + 1;
        if width >= mask.n().get() {
            return None;
        }
        let inner = mask.shrink(first, StrandCount::new(width).ok()?);
        let r = self.full(&inner)?;
        let shift = (first - 1) as u8;
        Some(Realized {
            word: Arc::new(r.word.iter().map(|&k| k + shift).collect()),
            plan: Arc::new(Plan::Window { first, last, inner: r.plan }),
        })
    }

    /// Candidate pieces to split off, best first.
    fn leaves(&self, mask: &UpperMask) -> Vec<(UpperMask, Leaf)> {
        let n = mask.n().get();
        let mut out: Vec<(UpperMask, Leaf)> = Vec::new();
        for f in detect(mask) {
            let m = formations::formation_matrix(&f).expect("detected descriptors are valid");
            out.push((m, Leaf::Formation(f)));
        }
        for first in 1..=n {
            for last in first + 1..=n {
                if last - first + 1 < n {
                    let m = mask.restrict(first, last);
                    if !m.is_empty() && m != *mask && m.is_t0() {
                        out.push((m, Leaf::Window));
                    }
                }
            }
        }
        let band = UpperMask::from_bits(mask.n(), 0);
        let band = mask.pairs().filter(|&(i, j)| j - i <= 2).fold(band, |b, (i, j)| b.with(i, j));
        if !band.is_empty() && band != *mask && band.is_t0() {
            out.push((band, Leaf::Band));
        }
        // Larger pieces first; formations before windows before band pieces;
        // then descriptor order.
        out.sort_by(|a, b| b.0.count().cmp(&a.0.count()).then_with(|| a.1.cmp(&b.1)));
        let mut seen = HashSet::new();
        out.retain(|(m, _)| seen.insert(*m));
        out
    }

    fn peel_layer(&self, mask: &UpperMask) -> Option<Realized> {
        for (piece, leaf) in self.leaves(mask) {
            let rest = mask.minus(&piece);
            if !rest.is_t0() {
                continue;
            }
            let leaf_r = match leaf {
                Leaf::Formation(f) => {
                    let w = formations::realize(&f).ok()?;
                    Realized {
                        word: Arc::new(w.letters().map(|k| k as u8).collect()),
                        plan: Arc::new(Plan::Formation { descriptor: f.to_string() }),
                    }
                }
                Leaf::Window | Leaf::Band => match self.cheap(&piece) {
                    Some(r) => r,
                    None => continue,
                },
            };
            if rest.is_empty() {
                return Some(leaf_r);
            }
            if let Some(rest_r) = self.cheap(&rest) {
                let mut word = leaf_r.word.to_vec();
                word.extend_from_slice(&rest_r.word);
                return Some(Realized {
                    word: Arc::new(word),
                    plan: Arc::new(Plan::Peel { leaf: leaf_r.plan, rest: rest_r.plan }),
                });
            }
        }
        None
    }

    fn ladder_layer(&self, mask: &UpperMask) -> Option<Realized> {
        let d = b_ladder_of(mask, None).ok()?;
        let out = ladder::search_w_form_with(&d, self.options.ladder_budget, &FormationMacros).ok()??;
        let word: Vec<u8> = out.diagram.to_projection_word().ok()?.letters().map(|k| k as u8).collect();
        word_fits(mask, &word).then(|| Realized {
            word: Arc::new(word),
            plan: Arc::new(Plan::Ladder { nodes: out.nodes, steps: out.trace.len() }),
        })
    }

    fn dfs_layer(&self, mask: &UpperMask) -> Option<Realized> {
        let (word, nodes) = word_search(mask, self.options.dfs_budget)?;
        word_fits(mask, &word).then(|| Realized { word: Arc::new(word), plan: Arc::new(Plan::Dfs { nodes }) })
    }

    /// Peeling decomposition of a T0 mask using only the window, band and
    /// peel layers.
    pub fn peel_decompose(&self, mask: &UpperMask) -> Option<Arc<Plan>> {
        self.cheap(mask).map(|r| r.plan)
    }

    pub fn realize_cn(&self, m: &PairCountMatrix) -> Result<Certificate, RealizeError> {
        check_sym_even(m)?;
        if let Some(v) = t0_violation(m)? {
            return Err(RealizeError::NotT0(v));
        }
        let mask = m02(m);
        let r = self.full(&mask).ok_or_else(|| RealizeError::RealizationFailed(mask.to_string()))?;
        let word = inflate(mask.n(), &r.word, m);
        let cert = Certificate {
            kind: CertKind::Cn,
            target: m.clone(),
            witness: Witness::Projection(word),
            method: serde_json::to_value(&*r.plan).expect("plan serializes"),
            verified: false,
        };
        seal(cert)
    }

    pub fn realize_ou(&self, m: &PairCountMatrix) -> Result<Certificate, RealizeError> {
        let n = m.n().get();
        for i in 1..=n {
            if m.get(i, i) != 0 {
                return Err(MatrixError::NonZeroDiagonal(i).into());
            }
            for j in 1..=n {
                if m.get(i, j) < 0 {
                    return Err(MatrixError::Negative(i, j).into());
                }
            }
        }
        let sum = m.plus(&m.transpose());
        if let Some((i, j)) = sum.upper_pairs().find(|&(i, j)| sum.get(i, j) % 2 != 0) {
            return Err(RealizeError::SumNotEven(i, j));
        }
        if let Some(v) = t0_violation(&sum)? {
            return Err(RealizeError::SumNotT0(v));
        }
        let base = self.realize_cn(&sum)?;
        let Witness::Projection(word) = &base.witness else { unreachable!("cn witnesses are projections") };
        let mut left_over = m.clone();
        let mut perm = Permutation::identity(m.n());
        let mut letters = Vec::with_capacity(word.len());
        for k in word.letters() {
            let (a, b) = (perm.label_at(k), perm.label_at(k + 1));
            // Earliest crossings of a pair take the (i over j) allotment of the smaller label.
            let (lo, hi) = (a.min(b), a.max(b));
            let over = if left_over.get(lo, hi) > 0 {
                left_over.add(lo, hi, -1);
                lo
            } else {
                left_over.add(hi, lo, -1);
                hi
            };
            letters.push((k, if over == a { Over::Left } else { Over::Right }));
            perm.swap_adjacent(k);
        }
        let cert = Certificate {
            kind: CertKind::Ou,
            target: m.clone(),
            witness: Witness::Diagram(DiagramWord::new(m.n(), letters)?),
            method: serde_json::json!({ "via": "cn", "plan": base.method }),
            verified: false,
        };
        seal(cert)
    }

    pub fn realize_crossing(&self, m: &PairCountMatrix) -> Result<Certificate, RealizeError> {
        let n = m.n().get();
        for i in 1..=n {
            if m.get(i, i) != 0 {
                return Err(MatrixError::NonZeroDiagonal(i).into());
            }
            for j in 1..=n {
                if m.get(i, j) < 0 {
                    return Err(MatrixError::Negative(i, j).into());
                }
                if m.get(i, j) != m.get(j, i) {
                    return Err(MatrixError::NotSymmetric(i, j).into());
                }
            }
        }
        if let Some(v) = t0_violation(m)? {
            return Err(RealizeError::NotT0(v));
        }
        let base = self.realize_cn(&m.scaled(2))?;
        let Witness::Projection(word) = &base.witness else { unreachable!("cn witnesses are projections") };
        let diagram = DiagramWord::new(m.n(), word.letters().map(|k| (k, Over::Left)))?;
        let cert = Certificate {
            kind: CertKind::Crossing,
            target: m.clone(),
            witness: Witness::Diagram(diagram),
            method: serde_json::json!({ "via": "cn of 2M", "plan": base.method }),
            verified: false,
        };
        seal(cert)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Leaf {
    Formation(FormationDescriptor),
    Window,
    Band,
}

fn seal(mut c: Certificate) -> Result<Certificate, RealizeError> {
    c.verified = verify_certificate(&c);
    if c.verified {
        Ok(c)
    } else {
        Err(RealizeError::RealizationFailed(c.target.to_string()))
    }
}

/// Raises each pair's count from 2 to `m(i,j)` by repeating its first
/// crossing `m(i,j) - 1` times.
fn inflate(n: StrandCount, base: &[u8], m: &PairCountMatrix) -> ProjectionWord {
    let mut perm = Permutation::identity(n);
    let mut done = HashSet::new();
    let mut out = Vec::with_capacity(base.len());
    for &k in base {
        let (a, b) = (perm.label_at(k as usize), perm.label_at(k as usize + 1));
        let copies = if done.insert((a.min(b), a.max(b))) { (m.get(a, b) - 1).max(1) as usize } else { 1 };
        out.extend(std::iter::repeat_n(k, copies));
        perm.swap_adjacent(k as usize);
    }
    ProjectionWord::from_raw(n, out)
}

/// Depth-first search for a pure word crossing each set pair of `mask`
/// exactly twice. Returns the word and the number of nodes expanded.
pub fn word_search(mask: &UpperMask, budget: usize) -> Option<(Vec<u8>, usize)> {
    let n = mask.n().get();
    let mut rem = vec![0u8; n * n];
    let mut total = 0;
    for (i, j) in mask.pairs() {
        rem[pair_index(n, i, j)] = 2;
        total += 2;
    }
    let mut s = WordSearch {
        n,
        at: (0..=n as u8).collect(),
        rem,
        word: Vec::with_capacity(total),
        left: total,
        nodes: 0,
        budget,
        dead: HashSet::new(),
    };
    match s.go(0) {
        Some(true) => Some((s.word, s.nodes)),
        _ => None,
    }
}

struct WordSearch {
    n: usize,
    /// Label at each position, 1-based.
    at: Vec<u8>,
    rem: Vec<u8>,
    word: Vec<u8>,
    left: usize,
    nodes: usize,
    budget: usize,
    dead: HashSet<(Vec<u8>, Vec<u8>)>,
}

impl WordSearch {
    fn idx(&self, a: u8, b: u8) -> usize {
        let (a, b) = (a.min(b) as usize, a.max(b) as usize);
        pair_index(self.n, a, b)
    }

    fn feasible(&self) -> bool {
        let n = self.n;
        for p in 1..=n {
            for q in p + 1..=n {
                let (a, b) = (self.at[p], self.at[q]);
                let r = self.rem[self.idx(a, b)];
                if a > b && r == 0 {
                    return false;
                }
                if r > 0 {
                    for mid in p + 1..q {
                        let c = self.at[mid];
                        if self.rem[self.idx(a, c)] == 0 && self.rem[self.idx(b, c)] == 0 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `None` when the budget runs out.
    fn go(&mut self, prev: usize) -> Option<bool> {
        if self.left == 0 {
            return Some(true);
        }
        let key = (self.at.clone(), self.rem.clone());
        if self.dead.contains(&key) {
            return Some(false);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        for k in 1..self.n {
            // Commuting neighbours are only taken in increasing order.
            if prev != 0 && k + 1 < prev {
                continue;
            }
            let idx = self.idx(self.at[k], self.at[k + 1]);
            if self.rem[idx] == 0 {
                continue;
            }
            self.rem[idx] -= 1;
            self.left -= 1;
            self.at.swap(k, k + 1);
            self.word.push(k as u8);
            if self.feasible() && self.go(k)? {
                return Some(true);
            }
            self.word.pop();
            self.at.swap(k, k + 1);
            self.left += 1;
            self.rem[idx] += 1;
        }
        self.dead.insert(key);
        Some(false)
    }
}

pub fn realize_cn(m: &PairCountMatrix) -> Result<Certificate, RealizeError> {
    Realizer::new(RealizerOptions::from_env()).realize_cn(m)
}

pub fn realize_ou(m: &PairCountMatrix) -> Result<Certificate, RealizeError> {
    Realizer::new(RealizerOptions::from_env()).realize_ou(m)
}

pub fn realize_crossing(m: &PairCountMatrix) -> Result<Certificate, RealizeError> {
    Realizer::new(RealizerOptions::from_env()).realize_crossing(m)
}

pub fn peel_decompose(mask: &UpperMask) -> Option<Arc<Plan>> {
    Realizer::new(RealizerOptions::from_env()).peel_decompose(mask)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub mask: String,
    pub method: String,
    pub word_length: usize,
    pub nodes: usize,
    pub micros: u128,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub n: usize,
    pub total: usize,
    pub verified: usize,
    pub total_micros: u128,
    pub max_micros: u128,
    pub rows: Vec<ReportRow>,
}

impl TheoremReport {
    pub fn succeeded(&self) -> bool {
        self.verified == self.total
    }

    /// Count of rows per closing layer, in first-seen order.
    pub fn layer_counts(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|(m, _)| *m == r.method) {
                Some(slot) => slot.1 += 1,
                None => out.push((r.method.clone(), 1)),
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }
}

/// Realizes the (0,2) form of every T0 mask on `n` strands and checks each
/// certificate independently. Failures are reported, not raised.
pub fn verify_theorem(n: usize, exec: Exec, options: RealizerOptions) -> Result<TheoremReport, RealizeError> {
    let masks = enumerate_t0(n)?;
    let engine = Realizer::new(options);
    let started = Instant::now();
    let rows = map_collect(&masks, exec, |mask| {
        let t = Instant::now();
        let outcome = engine.realize_cn(&mask.to_matrix());
        let micros = t.elapsed().as_micros();
        match outcome {
            Ok(c) => {
                let Witness::Projection(w) = &c.witness else { unreachable!("cn witnesses are projections") };
                let plan_layer = c.method.get("layer").and_then(|l| l.as_str()).unwrap_or("unknown").to_string();
                let nodes = engine.full(mask).map(|r| r.plan.nodes()).unwrap_or(0);
                ReportRow {
                    mask: mask.to_pair_list(),
                    method: plan_layer,
                    word_length: w.len(),
                    nodes,
                    micros,
                    verified: verify_certificate(&c),
                }
            }
            Err(_) => ReportRow {
                mask: mask.to_pair_list(),
                method: "unknown".to_string(),
                word_length: 0,
                nodes: 0,
                micros,
                verified: false,
            },
        }
    });
    let verified = rows.iter().filter(|r| r.verified).count();
    let max_micros = rows.iter().map(|r| r.micros).max().unwrap_or(0);
    Ok(TheoremReport { n, total: rows.len(), verified, total_micros: started.elapsed().as_micros(), max_micros, rows })
}
