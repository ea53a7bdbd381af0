//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's own matrix or ladder code.

#![allow(dead_code)]

use braidmat::{DiagramWord, LadderDiagram, LadderEdge, Over, PairCountMatrix, ProjectionWord, StrandCount};
use rand::Rng;

pub type Grid = Vec<Vec<i64>>;

pub fn sc(n: usize) -> StrandCount {
    StrandCount::new(n).unwrap()
}

pub fn grid(m: &PairCountMatrix) -> Grid {
    let n = m.n().get();
    (1..=n).map(|i| (1..=n).map(|j| m.get(i, j)).collect()).collect()
}

/// Crossing counts found by tracking where each strand currently sits.
pub fn cn(n: usize, letters: &[usize]) -> Grid {
    let mut pos: Vec<usize> = (0..n).collect();
    let mut out = vec![vec![0; n]; n];
    for &k in letters {
        let a = pos.iter().position(|&p| p == k - 1).unwrap();
        let b = pos.iter().position(|&p| p == k).unwrap();
        out[a][b] += 1;
        out[b][a] += 1;
        pos[a] = k;
        pos[b] = k - 1;
    }
    out
}

pub fn pure(n: usize, letters: &[usize]) -> bool {
    let mut pos: Vec<usize> = (0..n).collect();
    for &k in letters {
        for p in pos.iter_mut() {
            if *p == k - 1 {
                *p = k;
            } else if *p == k {
                *p = k - 1;
            }
        }
    }
    pos.iter().enumerate().all(|(s, &p)| s == p)
}

/// Over/under counts: `out[a][b]` counts crossings where strand `a+1` is on top.
pub fn ou(n: usize, letters: &[(usize, bool)]) -> (Grid, Grid) {
    let mut pos: Vec<usize> = (0..n).collect();
    let mut ou = vec![vec![0; n]; n];
    let mut signed = vec![vec![0; n]; n];
    for &(k, left_over) in letters {
        let a = pos.iter().position(|&p| p == k - 1).unwrap();
        let b = pos.iter().position(|&p| p == k).unwrap();
        let (top, bottom, sign) = if left_over { (a, b, 1) } else { (b, a, -1) };
        ou[top][bottom] += 1;
        signed[top][bottom] += sign;
        pos[a] = k;
        pos[b] = k - 1;
    }
    (ou, signed)
}

pub fn diagram_letters(d: &DiagramWord) -> Vec<(usize, bool)> {
    d.letters().map(|(k, o)| (k, o == Over::Left)).collect()
}

pub fn letters(w: &ProjectionWord) -> Vec<usize> {
    w.letters().collect()
}

/// T0 on the symmetric closure, checked on every triple.
pub fn t0(m: &Grid) -> bool {
    let n = m.len();
    let z = |i: usize, j: usize| m[i][j] == 0 && m[j][i] == 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if z(i, j) && z(j, k) && !z(i, k) {
                    return false;
                }
            }
        }
    }
    true
}

/// Number of T0 subsets of the pairs of `n` strands, by brute force.
pub fn brute_t0_count(n: usize) -> u64 {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let idx = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).unwrap();
    let triples: Vec<(u32, u32, u32)> = (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
        .map(|(i, j, k)| (idx(i, j) as u32, idx(j, k) as u32, idx(i, k) as u32))
        .collect();
    let mut count = 0;
    for bits in 0u64..(1 << pairs.len()) {
        let on = |p: u32| bits >> p & 1 == 1;
        if triples.iter().all(|&(a, b, c)| on(a) || on(b) || !on(c)) {
            count += 1;
        }
    }
    count
}

/// Labels by position and accumulated counts of a BW-ladder diagram.
pub fn ladder_eval(n: usize, edges: &[LadderEdge]) -> (Vec<usize>, Grid) {
    let mut label: Vec<usize> = (0..n).collect();
    let mut counts = vec![vec![0; n]; n];
    for e in edges {
        match *e {
            LadderEdge::Black(i, j) => {
                let (a, b) = (label[i as usize - 1], label[j as usize - 1]);
                counts[a][b] += 2;
                counts[b][a] += 2;
            }
            LadderEdge::White(k) => {
                let k = k as usize;
                let (a, b) = (label[k - 1], label[k]);
                counts[a][b] += 1;
                counts[b][a] += 1;
                label.swap(k - 1, k);
            }
        }
    }
    (label, counts)
}

pub fn random_word<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(1..n)).collect()
}

/// Appends adjacent swaps that return every strand to its start.
pub fn close_up(n: usize, word: &mut Vec<usize>) {
    let mut label: Vec<usize> = (0..n).collect();
    for &k in word.iter() {
        label.swap(k - 1, k);
    }
    while let Some(p) = (0..n - 1).find(|&p| label[p] > label[p + 1]) {
        label.swap(p, p + 1);
        word.push(p + 1);
    }
}

pub fn random_edge<R: Rng>(rng: &mut R, n: usize) -> LadderEdge {
    if rng.gen_bool(0.4) {
        let i = rng.gen_range(1..n);
        let j = rng.gen_range(i + 1..=n);
        LadderEdge::Black(i as u8, j as u8)
    } else {
        LadderEdge::White(rng.gen_range(1..n) as u8)
    }
}

pub fn random_diagram<R: Rng>(rng: &mut R, n: usize, len: usize) -> LadderDiagram {
    LadderDiagram::new(sc(n), (0..len).map(|_| random_edge(rng, n)).collect()).unwrap()
}
