use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{RawResult, SearchOptions};
use crate::fqlin::FVec;
use crate::predicates::{pair_conflict, Property};

/// Compatibility ("no conflict") adjacency as dense bitsets.
pub struct ConflictGraph {
    n: usize,
    words: usize,
    compat: Vec<u64>,
}

impl ConflictGraph {
    pub fn build(vertices: &[FVec], property: Property) -> Self {
        let n = vertices.len();
        let words = n.div_ceil(64);
        let field = vertices[0].field();
        let rows: Vec<Vec<u64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words];
                for j in 0..n {
                    if i != j && !pair_conflict(property, field, vertices[i].entries(), vertices[j].entries()) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        ConflictGraph { n, words, compat: rows.concat() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.compat[v * self.words..(v + 1) * self.words]
    }

    pub fn conflicts(&self, a: usize, b: usize) -> bool {
        a != b && self.row(a)[b / 64] >> (b % 64) & 1 == 0
    }

    /// Number of vertices conflicting with `v`.
    pub fn conflict_degree(&self, v: usize) -> usize {
        self.n - 1 - self.row(v).iter().map(|w| w.count_ones() as usize).sum::<usize>()
    }
}

type Bits = Vec<u64>;

#[inline]
fn first_bit(b: &[u64]) -> Option<usize> {
    b.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

#[inline]
fn clear(b: &mut [u64], v: usize) {
    b[v / 64] &= !(1 << (v % 64));
}

#[inline]
fn is_empty(b: &[u64]) -> bool {
    b.iter().all(|&w| w == 0)
}

fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Greedy sequential colouring of `p` in increasing vertex order. Returns
/// vertices grouped by colour class together with each one's colour
/// (1-based), colours nondecreasing.
fn color_sort(g: &ConflictGraph, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::new();
    let mut colors = Vec::new();
    let mut uncolored = p.to_vec();
    let mut color = 0;
    while !is_empty(&uncolored) {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(v) = first_bit(&avail) {
            clear(&mut uncolored, v);
            clear(&mut avail, v);
            // same colour class only for vertices not compatible with v
            for (a, r) in avail.iter_mut().zip(g.row(v)) {
                *a &= !r;
            }
            order.push(v);
            colors.push(color);
        }
    }
    (order, colors)
}

struct Shared {
    nodes: AtomicU64,
    global_best: AtomicUsize,
    exhausted: AtomicBool,
    budget: Option<u64>,
}

struct Branch<'a> {
    g: &'a ConflictGraph,
    shared: &'a Shared,
    best: Vec<usize>,
}

impl Branch<'_> {
    fn can_skip(&self, bound: usize) -> bool {
        bound <= self.best.len() || bound < self.shared.global_best.load(Ordering::Relaxed)
    }

    fn record(&mut self, clique: &[usize]) {
        if clique.len() > self.best.len() {
            self.best = clique.to_vec();
            self.shared.global_best.fetch_max(clique.len(), Ordering::Relaxed);
        }
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut p: Bits) {
        let nodes = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.shared.budget.is_some_and(|b| nodes > b) {
            self.shared.exhausted.store(true, Ordering::Relaxed);
        }
        if self.shared.exhausted.load(Ordering::Relaxed) {
            return;
        }
        let (order, colors) = color_sort(self.g, &p);
        for idx in (0..order.len()).rev() {
            if self.can_skip(clique.len() + colors[idx]) {
                return;
            }
            let v = order[idx];
            clique.push(v);
            let next = and(&p, self.g.row(v));
            if is_empty(&next) {
                self.record(clique);
            } else {
                self.expand(clique, next);
            }
            clique.pop();
            clear(&mut p, v);
            if self.shared.exhausted.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

/// Maximum independent set of the conflict graph, i.e. a maximum clique
/// of the compatibility graph. Root branches are explored in parallel
/// unless `opts.sequential`; the witness is the same either way.
pub(crate) fn max_independent_set(g: &ConflictGraph, opts: SearchOptions, anchor: bool) -> RawResult {
    let shared =
        Shared { nodes: AtomicU64::new(0), global_best: AtomicUsize::new(0), exhausted: AtomicBool::new(false), budget: opts.budget };
    let mut root_clique = Vec::new();
    let mut p: Bits = vec![0; g.words];
    for v in 0..g.n {
        p[v / 64] |= 1 << (v % 64);
    }
    if anchor {
        root_clique.push(0);
        p = and(&p, g.row(0));
    }
    let trivial = root_clique.clone();
    if is_empty(&p) {
        let best = if root_clique.is_empty() { vec![0] } else { root_clique };
        return RawResult { best, nodes: 1, exhausted: false };
    }

    let best = if opts.sequential {
        let mut b = Branch { g, shared: &shared, best: trivial };
        let mut clique = root_clique;
        b.expand(&mut clique, p);
        b.best
    } else {
        shared.nodes.fetch_add(1, Ordering::Relaxed);
        let (order, colors) = color_sort(g, &p);
        // branch idx explores order[idx] with candidates order[..idx] ∩ N(v)
        let mut prefix: Bits = vec![0; g.words];
        let mut prefixes = Vec::with_capacity(order.len());
        for &v in &order {
            prefixes.push(prefix.clone());
            prefix[v / 64] |= 1 << (v % 64);
        }
        let results: Vec<Option<Vec<usize>>> = (0..order.len())
            .into_par_iter()
            .rev()
            .map(|idx| {
                let bound = root_clique.len() + colors[idx];
                if bound < shared.global_best.load(Ordering::Relaxed) {
                    return None;
                }
                let mut b = Branch { g, shared: &shared, best: Vec::new() };
                let v = order[idx];
                let mut clique = root_clique.clone();
                clique.push(v);
                let next = and(&prefixes[idx], g.row(v));
                if is_empty(&next) {
                    b.record(&clique);
                } else {
                    b.expand(&mut clique, next);
                }
                Some(b.best)
            })
            .collect();
        // first maximum in sequential branch order
        let mut best = trivial;
        for r in results.into_iter().flatten() {
            if r.len() > best.len() {
                best = r;
            }
        }
        best
    };
    let best = if best.is_empty() { vec![0] } else { best };
    RawResult { best, nodes: shared.nodes.load(Ordering::Relaxed), exhausted: shared.exhausted.load(Ordering::Relaxed) }
}
