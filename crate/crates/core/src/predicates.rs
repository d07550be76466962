//! Forbidden-configuration predicates and whole-set scans.
//!
//! Every predicate requires its arguments to be pairwise distinct; a tuple
//! with a repeated vector is simply not a configuration.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fqlin::{diff_dot_raw, dot, self_dot_diff_raw, vsub, FVec, FieldSpec};

/// The configuration kinds a set can be asked to avoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    RightAngle,
    /// `k`-right corner, `k >= 2`.
    KRightCorner(usize),
    AllRightTriangle,
    SelfOrthDiff,
    /// Two words whose Hamming distance is a positive multiple of `q`.
    DivisibleHamming,
}

impl Property {
    pub fn tag(self) -> &'static str {
        match self {
            Property::RightAngle => "right-angle",
            Property::KRightCorner(_) => "k-right-corner",
            Property::AllRightTriangle => "all-right-triangle",
            Property::SelfOrthDiff => "self-orthogonal-diff",
            Property::DivisibleHamming => "divisible-hamming",
        }
    }

    /// Parses a tag, accepting the short CLI aliases too. `k` is required
    /// for the corner property and ignored otherwise.
    pub fn parse(tag: &str, k: Option<usize>) -> Result<Self> {
        Ok(match tag {
            "right-angle" | "R" => Property::RightAngle,
            "k-right-corner" | "corner" => {
                let k = k.ok_or_else(|| Error::Domain("corner property needs k".into()))?;
                if k < 2 {
                    return Err(Error::Domain(format!("k={k}: corners need k >= 2")));
                }
                Property::KRightCorner(k)
            }
            "all-right-triangle" | "all-right" => Property::AllRightTriangle,
            "self-orthogonal-diff" | "self-orth" | "S" => Property::SelfOrthDiff,
            "divisible-hamming" | "hamming" | "T" => Property::DivisibleHamming,
            other => return Err(Error::Unknown { what: "property", name: other.to_string() }),
        })
    }

    /// Number of vectors in one forbidden configuration.
    pub fn arity(self) -> usize {
        match self {
            Property::RightAngle | Property::AllRightTriangle => 3,
            Property::KRightCorner(k) => k + 1,
            Property::SelfOrthDiff | Property::DivisibleHamming => 2,
        }
    }

    pub fn k(self) -> Option<usize> {
        match self {
            Property::KRightCorner(k) => Some(k),
            _ => None,
        }
    }

    /// Whether the configuration depends only on pairwise differences.
    pub fn translation_invariant(self) -> bool {
        !matches!(self, Property::DivisibleHamming)
    }

    /// Evaluates the predicate on a tuple in witness order.
    pub fn holds(self, tuple: &[&FVec]) -> Result<bool> {
        if tuple.len() != self.arity() {
            return Err(Error::Domain(format!("{} expects {} vectors, got {}", self.tag(), self.arity(), tuple.len())));
        }
        match self {
            Property::RightAngle => is_right_angle(tuple[0], tuple[1], tuple[2]),
            Property::KRightCorner(_) => {
                let rest: Vec<FVec> = tuple[1..].iter().map(|v| (*v).clone()).collect();
                is_k_right_corner(tuple[0], &rest)
            }
            Property::AllRightTriangle => is_all_right_triangle(tuple[0], tuple[1], tuple[2]),
            Property::SelfOrthDiff => has_self_orth_diff(tuple[0], tuple[1]),
            Property::DivisibleHamming => {
                let d = hamming(tuple[0], tuple[1])?;
                Ok(d > 0 && d % tuple[0].field().q() as usize == 0)
            }
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::KRightCorner(k) => write!(f, "{k}-right-corner"),
            p => f.write_str(p.tag()),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    /// Accepts every tag of [`Property::parse`] plus `<k>-right-corner`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(k) = s.strip_suffix("-right-corner").and_then(|k| k.parse::<usize>().ok()) {
            return Property::parse("k-right-corner", Some(k));
        }
        Property::parse(s, None)
    }
}

fn check_same(vs: &[&FVec]) -> Result<()> {
    let first = vs[0];
    for v in &vs[1..] {
        if v.field() != first.field() || v.len() != first.len() {
            return Err(Error::Mismatch(format!(
                "vectors over {}^{} and {}^{}",
                first.field(),
                first.len(),
                v.field(),
                v.len()
            )));
        }
    }
    Ok(())
}

fn pairwise_distinct(vs: &[&FVec]) -> bool {
    (0..vs.len()).all(|i| (i + 1..vs.len()).all(|j| vs[i] != vs[j]))
}

/// Right angle at `z`: `x, y, z` distinct and `<x - z, y - z> = 0`.
pub fn is_right_angle(x: &FVec, y: &FVec, z: &FVec) -> Result<bool> {
    check_same(&[x, y, z])?;
    if !pairwise_distinct(&[x, y, z]) {
        return Ok(false);
    }
    Ok(dot(&vsub(x, z)?, &vsub(y, z)?)? == 0)
}

/// `k`-right corner with apex `x0` and legs `rest` (`k = rest.len() >= 2`).
pub fn is_k_right_corner(x0: &FVec, rest: &[FVec]) -> Result<bool> {
    if rest.len() < 2 {
        return Err(Error::Domain(format!("k={}: corners need k >= 2", rest.len())));
    }
    let mut all: Vec<&FVec> = vec![x0];
    all.extend(rest.iter());
    check_same(&all)?;
    if !pairwise_distinct(&all) {
        return Ok(false);
    }
    let legs = rest.iter().map(|x| vsub(x, x0)).collect::<Result<Vec<_>>>()?;
    for i in 0..legs.len() {
        for j in i + 1..legs.len() {
            if dot(&legs[i], &legs[j])? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn has_self_orth_diff(x: &FVec, y: &FVec) -> Result<bool> {
    check_same(&[x, y])?;
    if x == y {
        return Ok(false);
    }
    let d = vsub(x, y)?;
    Ok(dot(&d, &d)? == 0)
}

/// Triangle whose three sides are pairwise orthogonal.
pub fn is_all_right_triangle(x: &FVec, y: &FVec, z: &FVec) -> Result<bool> {
    check_same(&[x, y, z])?;
    if !pairwise_distinct(&[x, y, z]) {
        return Ok(false);
    }
    let (xy, yz, zx) = (vsub(x, y)?, vsub(y, z)?, vsub(z, x)?);
    Ok(dot(&xy, &yz)? == 0 && dot(&yz, &zx)? == 0 && dot(&zx, &xy)? == 0)
}

/// Checks that "sides pairwise orthogonal" and "sides all self-orthogonal"
/// agree on this triangle. Always true for odd `q`.
pub fn all_right_equiv_witness(x: &FVec, y: &FVec, z: &FVec) -> Result<bool> {
    check_same(&[x, y, z])?;
    let (xy, yz, zx) = (vsub(x, y)?, vsub(y, z)?, vsub(z, x)?);
    let pairwise = dot(&xy, &yz)? == 0 && dot(&yz, &zx)? == 0 && dot(&zx, &xy)? == 0;
    let selfs = dot(&xy, &xy)? == 0 && dot(&yz, &yz)? == 0 && dot(&zx, &zx)? == 0;
    Ok(pairwise == selfs)
}

pub fn hamming(x: &FVec, y: &FVec) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Mismatch(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    hamming_words(x.entries(), y.entries())
}

/// Hamming distance between words over any alphabet.
pub fn hamming_words<T: PartialEq>(x: &[T], y: &[T]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::Mismatch(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// A forbidden configuration found in a scanned set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: Property,
    /// Indices into the scanned set, in the argument order of the predicate
    /// (apex last for right angles, apex first for corners).
    pub indices: Vec<usize>,
    pub vectors: Vec<FVec>,
}

impl Violation {
    fn new(kind: Property, set: &[FVec], indices: Vec<usize>) -> Self {
        let vectors = indices.iter().map(|&i| set[i].clone()).collect();
        Violation { kind, indices, vectors }
    }

    /// Re-evaluates the predicate on the stored witness.
    pub fn replay(&self) -> Result<bool> {
        let refs: Vec<&FVec> = self.vectors.iter().collect();
        self.kind.holds(&refs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind.tag(),
            "k": self.kind.k().map(|k| k.to_string()),
            "indices": self.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "vectors": self.vectors.iter().map(|v| v.to_csv()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanOutcome {
    Ok,
    Violation(Violation),
    /// The budget (in examined tuples or partial tuples) ran out first.
    BudgetExceeded { examined: u64 },
}

impl ScanOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, ScanOutcome::Ok)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            ScanOutcome::Violation(v) => Some(v),
            _ => None,
        }
    }
}

/// Sets at least this large are scanned in parallel when no budget is set.
const PARALLEL_THRESHOLD: usize = 64;

/// Exhaustively scans `set` for `property`, returning the first violation
/// in lexicographic tuple order.
///
/// Pair properties scan `i < j`. Right angles and corners iterate the apex
/// first, then the legs as an increasing index tuple. All-right triangles
/// scan `i < j < k`. With `budget = Some(b)` the scan is sequential and
/// gives up after `b` examined tuples.
pub fn scan_set(set: &[FVec], property: Property, budget: Option<u64>) -> Result<ScanOutcome> {
    if set.is_empty() {
        return Ok(ScanOutcome::Ok);
    }
    let refs: Vec<&FVec> = set.iter().collect();
    check_same(&refs)?;
    if let Property::KRightCorner(k) = property {
        if k < 2 {
            return Err(Error::Domain(format!("k={k}: corners need k >= 2")));
        }
    }
    let field = set[0].field();
    let parallel = budget.is_none() && set.len() >= PARALLEL_THRESHOLD;
    let mut counter = Budget::new(budget);

    let found = match property {
        Property::SelfOrthDiff | Property::DivisibleHamming => {
            let per_first = |i: usize, counter: &mut Budget| -> Step {
                for j in i + 1..set.len() {
                    if !counter.tick() {
                        return Step::Exhausted;
                    }
                    if pair_conflict(property, field, set[i].entries(), set[j].entries()) {
                        return Step::Found(vec![i, j]);
                    }
                }
                Step::Continue
            };
            run_outer(set.len(), parallel, &mut counter, per_first)
        }
        Property::RightAngle | Property::KRightCorner(_) => {
            let k = property.k().unwrap_or(2);
            let per_apex = |apex: usize, counter: &mut Budget| corner_at_apex(set, field, apex, k, counter);
            let step = run_outer(set.len(), parallel, &mut counter, per_apex);
            match (property, step) {
                (Property::RightAngle, Step::Found(t)) => Step::Found(vec![t[1], t[2], t[0]]),
                (_, s) => s,
            }
        }
        Property::AllRightTriangle => {
            let per_first = |i: usize, counter: &mut Budget| -> Step {
                let x = set[i].entries();
                for j in i + 1..set.len() {
                    let y = set[j].entries();
                    for l in j + 1..set.len() {
                        if !counter.tick() {
                            return Step::Exhausted;
                        }
                        let z = set[l].entries();
                        if diff_dot_raw(field, x, z, y) == 0
                            && diff_dot_raw(field, y, x, z) == 0
                            && diff_dot_raw(field, z, y, x) == 0
                        {
                            return Step::Found(vec![i, j, l]);
                        }
                    }
                }
                Step::Continue
            };
            run_outer(set.len(), parallel, &mut counter, per_first)
        }
    };

    Ok(match found {
        Step::Continue => ScanOutcome::Ok,
        Step::Found(idx) => ScanOutcome::Violation(Violation::new(property, set, idx)),
        Step::Exhausted => ScanOutcome::BudgetExceeded { examined: counter.used },
    })
}

#[inline]
pub(crate) fn pair_conflict(property: Property, field: FieldSpec, x: &[u32], y: &[u32]) -> bool {
    match property {
        Property::SelfOrthDiff => x != y && self_dot_diff_raw(field, x, y) == 0,
        Property::DivisibleHamming => {
            let d = x.iter().zip(y).filter(|(a, b)| a != b).count();
            d > 0 && d % field.q() as usize == 0
        }
        _ => unreachable!("not a pair property"),
    }
}

enum Step {
    Continue,
    Found(Vec<usize>),
    Exhausted,
}

struct Budget {
    limit: Option<u64>,
    used: u64,
}

impl Budget {
    fn new(limit: Option<u64>) -> Self {
        Budget { limit, used: 0 }
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.used += 1;
        self.limit.map_or(true, |l| self.used <= l)
    }
}

fn run_outer<F>(len: usize, parallel: bool, counter: &mut Budget, body: F) -> Step
where
    F: Fn(usize, &mut Budget) -> Step + Sync,
{
    if parallel {
        let hit = (0..len).into_par_iter().find_map_first(|i| {
            let mut local = Budget::new(None);
            match body(i, &mut local) {
                Step::Found(t) => Some(t),
                _ => None,
            }
        });
        return hit.map_or(Step::Continue, Step::Found);
    }
    for i in 0..len {
        match body(i, counter) {
            Step::Continue => {}
            s => return s,
        }
    }
    Step::Continue
}

/// Lexicographically first `k`-set of legs forming a corner at `apex`,
/// returned as `[apex, legs...]`. Legs of a corner are exactly a `k`-clique
/// in the graph "differences from the apex are orthogonal".
fn corner_at_apex(set: &[FVec], field: FieldSpec, apex: usize, k: usize, counter: &mut Budget) -> Step {
    let z = set[apex].entries();
    let others: Vec<usize> = (0..set.len()).filter(|&i| i != apex).collect();
    let m = others.len();
    if m < k {
        return Step::Continue;
    }
    let orth = |a: usize, b: usize| diff_dot_raw(field, set[others[a]].entries(), set[others[b]].entries(), z) == 0;

    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    // candidate lists per depth
    let mut stack: Vec<Vec<usize>> = vec![(0..m).collect()];
    let mut cursor: Vec<usize> = vec![0];
    while let Some(depth) = cursor.len().checked_sub(1) {
        let pos = cursor[depth];
        let cands = &stack[depth];
        if pos >= cands.len() || cands.len() - pos < k - depth {
            stack.pop();
            cursor.pop();
            chosen.pop();
            continue;
        }
        cursor[depth] += 1;
        let v = cands[pos];
        if !counter.tick() {
            return Step::Exhausted;
        }
        if depth + 1 == k {
            chosen.push(v);
            let mut t = vec![apex];
            t.extend(chosen.iter().map(|&c| others[c]));
            return Step::Found(t);
        }
        let next: Vec<usize> = cands[pos + 1..].iter().copied().filter(|&w| orth(v, w)).collect();
        chosen.push(v);
        stack.push(next);
        cursor.push(0);
    }
    Step::Continue
}
