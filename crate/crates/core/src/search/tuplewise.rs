use super::{RawResult, SearchOptions};
use crate::fqlin::{diff_dot_raw, FVec, FieldSpec};
use crate::predicates::Property;

struct Checker<'a> {
    vs: &'a [FVec],
    field: FieldSpec,
    property: Property,
}

impl Checker<'_> {
    #[inline]
    fn orth_at(&self, apex: usize, a: usize, b: usize) -> bool {
        diff_dot_raw(self.field, self.vs[a].entries(), self.vs[b].entries(), self.vs[apex].entries()) == 0
    }

    /// Does the tuple (distinct vertices) form a forbidden configuration?
    fn forbidden(&self, t: &[usize]) -> bool {
        match self.property {
            Property::RightAngle => {
                let (a, b, c) = (t[0], t[1], t[2]);
                self.orth_at(c, a, b) || self.orth_at(b, a, c) || self.orth_at(a, b, c)
            }
            Property::AllRightTriangle => {
                let (a, b, c) = (t[0], t[1], t[2]);
                self.orth_at(c, a, b) && self.orth_at(b, a, c) && self.orth_at(a, b, c)
            }
            Property::KRightCorner(_) => (0..t.len()).any(|ai| {
                let legs: Vec<usize> = t.iter().enumerate().filter(|&(i, _)| i != ai).map(|(_, &v)| v).collect();
                (0..legs.len()).all(|i| (i + 1..legs.len()).all(|j| self.orth_at(t[ai], legs[i], legs[j])))
            }),
            _ => unreachable!("pair properties use the pairwise solver"),
        }
    }

    /// Whether adding `c` to `set` (which already ends with the newest
    /// member `v`) creates a forbidden tuple containing both `v` and `c`.
    fn clashes(&self, set: &[usize], c: usize) -> bool {
        let (&v, rest) = set.split_last().expect("nonempty");
        let extra = self.property.arity() - 2;
        if rest.len() < extra {
            return false;
        }
        let mut tuple = vec![v, c];
        self.choose(rest, extra, 0, &mut tuple)
    }

    fn choose(&self, rest: &[usize], need: usize, from: usize, tuple: &mut Vec<usize>) -> bool {
        if need == 0 {
            return self.forbidden(tuple);
        }
        for i in from..=rest.len() - need {
            tuple.push(rest[i]);
            let hit = self.choose(rest, need - 1, i + 1, tuple);
            tuple.pop();
            if hit {
                return true;
            }
        }
        false
    }
}

struct Dfs<'a> {
    check: Checker<'a>,
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl Dfs<'_> {
    /// Every candidate is individually compatible with `set`.
    fn rec(&mut self, set: &mut Vec<usize>, cands: &[usize]) {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.exhausted = true;
            return;
        }
        if set.len() > self.best.len() {
            self.best = set.clone();
        }
        for (pos, &v) in cands.iter().enumerate() {
            if set.len() + (cands.len() - pos) <= self.best.len() {
                return;
            }
            set.push(v);
            let next: Vec<usize> = cands[pos + 1..].iter().copied().filter(|&c| !self.check.clashes(set, c)).collect();
            self.rec(set, &next);
            set.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Backtracking over vertices in index order with forward checking; the
/// bound is current size plus surviving candidates.
pub(crate) fn max_free_set(vs: &[FVec], property: Property, opts: SearchOptions, anchor: bool) -> RawResult {
    let check = Checker { vs, field: vs[0].field(), property };
    let mut dfs = Dfs { check, best: Vec::new(), nodes: 0, budget: opts.budget, exhausted: false };
    let mut set = Vec::new();
    let cands: Vec<usize> = if anchor {
        set.push(0);
        // nothing clashes with a single point
        (1..vs.len()).collect()
    } else {
        (0..vs.len()).collect()
    };
    dfs.rec(&mut set, &cands);
    RawResult { best: dfs.best, nodes: dfs.nodes, exhausted: dfs.exhausted }
}
