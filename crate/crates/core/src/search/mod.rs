//! Exact extremal values at small parameters.
//!
//! Pair properties become a maximum independent set problem on the conflict
//! graph (solved as a maximum clique in its complement with a greedy
//! colouring bound). Triple and corner properties are handled by a
//! backtracking search with forward checking.

mod pairwise;
mod tuplewise;

use serde_json::json;

use crate::constructions::{Alphabet, PointSet};
use crate::error::{Error, Result};
use crate::fqlin::{FVec, FieldSpec};
use crate::predicates::Property;

pub use pairwise::ConflictGraph;

/// Largest universe the pairwise solver accepts (dense adjacency bitsets).
pub const MAX_PAIRWISE_VERTICES: usize = 1 << 14;
/// Largest universe the tuplewise solver accepts.
pub const MAX_TUPLEWISE_VERTICES: usize = 1 << 10;

/// Base-`q` digits of `index`, most significant first.
pub fn unrank(index: u64, n: usize, q: u32) -> Result<FVec> {
    let field = FieldSpec::new(q)?;
    let total = (q as u64).checked_pow(n as u32).ok_or_else(|| Error::Domain("q^n overflows".into()))?;
    if n == 0 || index >= total {
        return Err(Error::Domain(format!("index {index} out of range 0..{q}^{n}")));
    }
    let mut e = vec![0u32; n];
    let mut idx = index;
    for slot in e.iter_mut().rev() {
        *slot = (idx % q as u64) as u32;
        idx /= q as u64;
    }
    FVec::new(field, e)
}

pub fn rank(v: &FVec) -> u64 {
    let q = v.field().q() as u64;
    v.entries().iter().fold(0u64, |acc, &e| acc * q + e as u64)
}

/// The vertex set of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universe {
    /// All of `F_q^n`, in rank order.
    Full { field: FieldSpec, n: usize },
    /// `{a, b}^n` embedded in `F_q^n`; word `i` has symbol `a` where the
    /// binary expansion of `i` (most significant first) has a 1.
    Binary { field: FieldSpec, n: usize, alphabet: Alphabet },
}

impl Universe {
    pub fn field(&self) -> FieldSpec {
        match self {
            Universe::Full { field, .. } | Universe::Binary { field, .. } => *field,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Universe::Full { n, .. } | Universe::Binary { n, .. } => *n,
        }
    }

    pub fn size(&self) -> Option<usize> {
        match self {
            Universe::Full { field, n } => (field.q() as usize).checked_pow(*n as u32),
            Universe::Binary { n, .. } => 1usize.checked_shl(*n as u32),
        }
    }

    pub fn vertices(&self) -> Result<Vec<FVec>> {
        let size = self.size().ok_or_else(|| Error::Domain("universe too large".into()))?;
        match self {
            Universe::Full { field, n } => (0..size as u64).map(|i| unrank(i, *n, field.q())).collect(),
            Universe::Binary { field, n, alphabet } => (0..size)
                .map(|i| {
                    let e = (0..*n).map(|j| if i >> (n - 1 - j) & 1 == 1 { alphabet.a } else { alphabet.b }).collect();
                    FVec::new(*field, e)
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictInstance {
    pub vertices: Vec<FVec>,
    pub property: Property,
    /// Vertex 0 can be assumed to lie in some optimal solution, because the
    /// automorphism group of the instance is transitive on vertices.
    pub symmetric: bool,
    /// Label used in outputs, e.g. `S(5,3)`.
    pub label: String,
}

impl ConflictInstance {
    pub fn new(universe: &Universe, property: Property, label: impl Into<String>) -> Result<Self> {
        let symmetric = match (universe, property) {
            // translations of F_q^n preserve every difference-based predicate
            (Universe::Full { .. }, p) => p.translation_invariant(),
            // flipping a coordinate of a binary word preserves Hamming distance
            (Universe::Binary { .. }, Property::DivisibleHamming) => true,
            _ => false,
        };
        Ok(ConflictInstance { vertices: universe.vertices()?, property, symmetric, label: label.into() })
    }

    pub fn arity(&self) -> usize {
        self.property.arity()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    ProvenOptimal,
    /// Node budget ran out; `optimum` is the best size found so far.
    BudgetExhausted,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::ProvenOptimal => "proven-optimal",
            Status::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub label: String,
    pub optimum: usize,
    pub witness: PointSet,
    /// Vertex indices of the witness, increasing.
    pub witness_indices: Vec<usize>,
    pub nodes_expanded: u64,
    pub status: Status,
}

impl SearchResult {
    pub fn is_proven(&self) -> bool {
        self.status == Status::ProvenOptimal
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": 1,
            "quantity": self.label,
            "property": self.witness.claimed.tag(),
            "k": self.witness.claimed.k().map(|k| k.to_string()),
            "q": self.witness.field.q().to_string(),
            "n": self.witness.n.to_string(),
            "optimum": self.optimum.to_string(),
            "status": self.status.as_str(),
            "nodes_expanded": self.nodes_expanded.to_string(),
            "witness": self.witness.vectors.iter().map(|v| v.to_csv()).collect::<Vec<_>>(),
            "source": "computed by exhaustive search",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of search nodes; `None` means unlimited.
    pub budget: Option<u64>,
    /// Disable parallel exploration of root branches.
    pub sequential: bool,
    /// Fix vertex 0 into the solution on symmetric instances.
    pub anchor: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: None, sequential: false, anchor: true }
    }
}

impl SearchOptions {
    pub fn sequential() -> Self {
        SearchOptions { sequential: true, ..Self::default() }
    }
}

pub(crate) struct RawResult {
    pub best: Vec<usize>,
    pub nodes: u64,
    pub exhausted: bool,
}

fn finish(instance: &ConflictInstance, raw: RawResult) -> SearchResult {
    let mut idx = raw.best;
    idx.sort_unstable();
    let field = instance.vertices.first().map(|v| v.field()).expect("nonempty universe");
    let n = instance.vertices[0].len();
    let vectors = idx.iter().map(|&i| instance.vertices[i].clone()).collect();
    let witness = PointSet::new(field, n, vectors, "search-witness", vec![("instance", instance.label.clone())], instance.property);
    SearchResult {
        label: instance.label.clone(),
        optimum: idx.len(),
        witness,
        witness_indices: idx,
        nodes_expanded: raw.nodes,
        status: if raw.exhausted { Status::BudgetExhausted } else { Status::ProvenOptimal },
    }
}

/// Maximum subset with no conflicting pair.
pub fn exact_pairwise(instance: &ConflictInstance, opts: SearchOptions) -> Result<SearchResult> {
    if instance.arity() != 2 {
        return Err(Error::Domain(format!("{} is not a pair property", instance.property)));
    }
    if instance.vertices.is_empty() || instance.vertices.len() > MAX_PAIRWISE_VERTICES {
        return Err(Error::Domain(format!(
            "universe of {} vertices outside 1..={MAX_PAIRWISE_VERTICES}",
            instance.vertices.len()
        )));
    }
    let graph = ConflictGraph::build(&instance.vertices, instance.property);
    let raw = pairwise::max_independent_set(&graph, opts, opts.anchor && instance.symmetric);
    Ok(finish(instance, raw))
}

/// Maximum subset containing no forbidden triple or `(k+1)`-tuple.
pub fn exact_tuplewise(instance: &ConflictInstance, opts: SearchOptions) -> Result<SearchResult> {
    if instance.arity() < 3 {
        return Err(Error::Domain(format!("{} is not a tuple property", instance.property)));
    }
    if instance.vertices.is_empty() || instance.vertices.len() > MAX_TUPLEWISE_VERTICES {
        return Err(Error::Domain(format!(
            "universe of {} vertices outside 1..={MAX_TUPLEWISE_VERTICES}",
            instance.vertices.len()
        )));
    }
    let raw = tuplewise::max_free_set(&instance.vertices, instance.property, opts, opts.anchor && instance.symmetric);
    Ok(finish(instance, raw))
}

pub fn exact(instance: &ConflictInstance, opts: SearchOptions) -> Result<SearchResult> {
    if instance.arity() == 2 {
        exact_pairwise(instance, opts)
    } else {
        exact_tuplewise(instance, opts)
    }
}

fn full(n: usize, q: u32) -> Result<Universe> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(Universe::Full { field: FieldSpec::new(q)?, n })
}

/// `S(n, q)`: no two points with a self-orthogonal difference.
pub fn exact_s(n: usize, q: u32, opts: SearchOptions) -> Result<SearchResult> {
    let inst = ConflictInstance::new(&full(n, q)?, Property::SelfOrthDiff, format!("S({n},{q})"))?;
    exact_pairwise(&inst, opts)
}

/// `T(n, q)`: binary words with no pairwise distance divisible by `q`.
pub fn exact_t(n: usize, q: u32, opts: SearchOptions) -> Result<SearchResult> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let u = Universe::Binary { field: FieldSpec::new(q)?, n, alphabet: Alphabet::default() };
    let inst = ConflictInstance::new(&u, Property::DivisibleHamming, format!("T({n},{q})"))?;
    exact_pairwise(&inst, opts)
}

/// `R(n, q)`: no right angle.
pub fn exact_r(n: usize, q: u32, opts: SearchOptions) -> Result<SearchResult> {
    let inst = ConflictInstance::new(&full(n, q)?, Property::RightAngle, format!("R({n},{q})"))?;
    exact_tuplewise(&inst, opts)
}

/// Largest set of `F_q^n` with no all-right triangle.
pub fn exact_all_right(n: usize, q: u32, opts: SearchOptions) -> Result<SearchResult> {
    let inst = ConflictInstance::new(&full(n, q)?, Property::AllRightTriangle, format!("AllRight({n},{q})"))?;
    exact_tuplewise(&inst, opts)
}

/// Largest `k`-right-corner-free set. Experimental beyond tiny sizes.
pub fn exact_corner(n: usize, q: u32, k: usize, opts: SearchOptions) -> Result<SearchResult> {
    if k < 2 {
        return Err(Error::Domain(format!("k={k}: corners need k >= 2")));
    }
    let inst = ConflictInstance::new(&full(n, q)?, Property::KRightCorner(k), format!("Corner{k}({n},{q})"))?;
    exact_tuplewise(&inst, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::scan_set;

    #[test]
    fn rank_unrank_examples() {
        assert_eq!(unrank(0, 2, 3).unwrap().entries(), &[0, 0]);
        assert_eq!(unrank(8, 2, 3).unwrap().entries(), &[2, 2]);
        assert!(unrank(9, 2, 3).is_err());
        for q in [3u32, 5] {
            for n in 1..=6usize {
                let total = (q as u64).pow(n as u32);
                if total > 20_000 {
                    continue;
                }
                for i in 0..total {
                    assert_eq!(rank(&unrank(i, n, q).unwrap()), i);
                }
            }
        }
    }

    #[test]
    fn binary_universe_order() {
        let u = Universe::Binary { field: FieldSpec::new(3).unwrap(), n: 3, alphabet: Alphabet::default() };
        let vs = u.vertices().unwrap();
        assert_eq!(vs.len(), 8);
        assert_eq!(vs[1].entries(), &[0, 0, 1]);
        assert_eq!(vs[6].entries(), &[1, 1, 0]);
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn wrong_solver_is_rejected() {
        let u = full(2, 3).unwrap();
        let inst = ConflictInstance::new(&u, Property::RightAngle, "R").unwrap();
        assert!(exact_pairwise(&inst, SearchOptions::default()).is_err());
        let inst = ConflictInstance::new(&u, Property::SelfOrthDiff, "S").unwrap();
        assert!(exact_tuplewise(&inst, SearchOptions::default()).is_err());
    }

    #[test]
    fn small_exact_values() {
        let s = exact_s(2, 3, SearchOptions::default()).unwrap();
        assert_eq!(s.optimum, 9);
        assert!(s.is_proven());
        assert_eq!(exact_t(3, 3, SearchOptions::default()).unwrap().optimum, 4);
        assert_eq!(exact_t(4, 3, SearchOptions::default()).unwrap().optimum, 8);
        assert_eq!(exact_r(1, 3, SearchOptions::default()).unwrap().optimum, 3);
        let ar = exact_all_right(2, 3, SearchOptions::default()).unwrap();
        assert_eq!(ar.optimum, 9);
        for r in [&s, &ar] {
            assert!(scan_set(&r.witness.vectors, r.witness.claimed, None).unwrap().is_ok());
        }
    }

    #[test]
    fn budget_exhaustion_reports_best_found() {
        let r = exact_t(6, 3, SearchOptions { budget: Some(3), ..SearchOptions::sequential() }).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
        assert!(scan_set(&r.witness.vectors, Property::DivisibleHamming, None).unwrap().is_ok());
        let r = exact_r(2, 3, SearchOptions { budget: Some(2), ..SearchOptions::sequential() }).unwrap();
        assert_eq!(r.status, Status::BudgetExhausted);
    }

    #[test]
    fn json_uses_decimal_strings() {
        let r = exact_t(3, 3, SearchOptions::sequential()).unwrap();
        let j = r.to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["optimum"], "4");
        assert_eq!(j["status"], "proven-optimal");
        assert_eq!(j["quantity"], "T(3,3)");
    }
}
