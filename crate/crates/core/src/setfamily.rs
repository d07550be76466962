//! Uniform set families with a strict cap on pairwise intersections,
//! built by a greedy scan over all `t`-subsets.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constructions::PointSet;
use crate::error::{Error, Result};
use crate::fqlin::{binomial, FVec, FieldSpec};
use crate::predicates::Property;

/// Rational intersection ceiling: blocks `F != G` need `|F ∩ G| < cap`.
pub type Cap = Ratio<u64>;

/// Order in which candidate blocks are offered to the greedy packer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PackingOrder {
    #[default]
    Lexicographic,
    /// Lexicographic list shuffled by a ChaCha8 stream with this seed.
    Shuffled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    pub n: usize,
    pub t: usize,
    pub cap: Cap,
    /// Sorted 1-based blocks, in the order they were accepted.
    pub blocks: Vec<Vec<usize>>,
}

/// Smallest integer `l` with `|F ∩ G| < cap  <=>  |F ∩ G| <= l - 1`.
pub fn cap_level(cap: Cap) -> u64 {
    cap.ceil().to_integer()
}

/// `ceil(C(n, l) / C(t, l)^2)`, the size every packing is expected to reach.
pub fn packing_floor(n: usize, t: usize, level: u64) -> BigUint {
    let num = binomial(n as i64, level as i64);
    let den = binomial(t as i64, level as i64);
    let den = &den * &den;
    if den == BigUint::from(0u8) {
        return BigUint::from(0u8);
    }
    num.div_ceil(&den)
}

impl SetSystem {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn level(&self) -> u64 {
        cap_level(self.cap)
    }

    pub fn floor_guarantee(&self) -> BigUint {
        packing_floor(self.n, self.t, self.level())
    }

    /// Re-checks block sizes, ranges and the pairwise intersection cap.
    /// Returns the first offending pair of block indices.
    pub fn verify(&self) -> std::result::Result<(), (usize, usize)> {
        for (i, b) in self.blocks.iter().enumerate() {
            let sorted = b.windows(2).all(|w| w[0] < w[1]);
            if b.len() != self.t || !sorted || b.iter().any(|&e| e == 0 || e > self.n) {
                return Err((i, i));
            }
        }
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                let inter = intersection_size(&self.blocks[i], &self.blocks[j]) as u64;
                if Cap::from_integer(inter) >= self.cap {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = format!("n={} t={} cap={}/{}\n", self.n, self.t, self.cap.numer(), self.cap.denom());
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for SetSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty set-system file".into()))?;
        let bad = || Error::Parse(format!("bad header {header:?}, expected `n=<n> t=<t> cap=<p>/<r>`"));
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 3 {
            return Err(bad());
        }
        let n: usize = fields[0].strip_prefix("n=").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let t: usize = fields[1].strip_prefix("t=").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let cap_text = fields[2].strip_prefix("cap=").ok_or_else(bad)?;
        let (p, r) = cap_text.split_once('/').ok_or_else(bad)?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        let r: u64 = r.parse().map_err(|_| bad())?;
        if r == 0 {
            return Err(bad());
        }
        let mut blocks = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let block = line
                .split(' ')
                .map(|e| e.parse::<usize>().map_err(|_| Error::Parse(format!("block line {}: bad element {e:?}", i + 1))))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        let sys = SetSystem { n, t, cap: Cap::new_raw(p, r), blocks };
        if sys.verify().is_err() {
            return Err(Error::Parse("set system violates its own invariants".into()));
        }
        // keep the stored ratio reduced, as the builder does
        Ok(SetSystem { cap: Cap::new(p, r), ..sys })
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// All `t`-subsets of `{1..n}` in lexicographic order.
pub fn t_subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=t).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost element that still has room
        let Some(i) = (0..t).rev().find(|&i| cur[i] < n - (t - 1 - i)) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..t {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn greedy_packing(n: usize, t: usize, cap: Cap) -> Result<SetSystem> {
    greedy_packing_ordered(n, t, cap, PackingOrder::Lexicographic)
}

pub fn greedy_packing_ordered(n: usize, t: usize, cap: Cap, order: PackingOrder) -> Result<SetSystem> {
    if t < 1 || t > n {
        return Err(Error::Domain(format!("need 1 <= t <= n (got n={n}, t={t})")));
    }
    if cap <= Cap::from_integer(0) || cap > Cap::from_integer(t as u64) {
        return Err(Error::Domain(format!("need 0 < cap <= t (got cap={cap}, t={t})")));
    }
    let mut candidates = t_subsets(n, t);
    if let PackingOrder::Shuffled(seed) = order {
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    // |F ∩ G| < cap  <=>  |F ∩ G| <= level - 1
    let max_inter = (cap_level(cap) - 1) as usize;
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut masks: Vec<u128> = Vec::new();
    let use_masks = n <= 128;
    for cand in candidates {
        let ok = if use_masks {
            let m = cand.iter().fold(0u128, |acc, &e| acc | 1u128 << (e - 1));
            let ok = masks.iter().all(|&b| (b & m).count_ones() as usize <= max_inter);
            if ok {
                masks.push(m);
            }
            ok
        } else {
            blocks.iter().all(|b| intersection_size(b, &cand) <= max_inter)
        };
        if ok {
            blocks.push(cand);
        }
    }
    Ok(SetSystem { n, t, cap, blocks })
}

/// Characteristic 0/1 vectors of the blocks, read in `F_q^n`.
pub fn char_vectors(sys: &SetSystem, field: FieldSpec) -> PointSet {
    let vectors = sys
        .blocks
        .iter()
        .map(|b| {
            let mut e = vec![0u32; sys.n];
            for &i in b {
                e[i - 1] = 1;
            }
            FVec::new(field, e).expect("0/1 entries are reduced")
        })
        .collect();
    PointSet::new(
        field,
        sys.n,
        vectors,
        "char-vectors",
        vec![("n", sys.n.to_string()), ("t", sys.t.to_string()), ("cap", sys.cap.to_string())],
        Property::RightAngle,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqlin::dot;

    fn cap(p: u64, r: u64) -> Cap {
        Cap::new(p, r)
    }

    #[test]
    fn small_examples() {
        let s = greedy_packing(4, 2, cap(1, 1)).unwrap();
        assert_eq!(s.blocks, vec![vec![1, 2], vec![3, 4]]);
        let s = greedy_packing(5, 5, cap(3, 1)).unwrap();
        assert_eq!(s.blocks, vec![vec![1, 2, 3, 4, 5]]);
    }

    /// Exhaustive maximum packing by branching on every block.
    fn max_packing(n: usize, t: usize, max_inter: usize) -> usize {
        let all = t_subsets(n, t);
        let conflict = |a: &Vec<usize>, b: &Vec<usize>| intersection_size(a, b) > max_inter;
        fn rec(all: &[Vec<usize>], from: usize, chosen: &mut Vec<usize>, best: &mut usize, conflict: &dyn Fn(&Vec<usize>, &Vec<usize>) -> bool) {
            *best = (*best).max(chosen.len());
            if chosen.len() + (all.len() - from) <= *best {
                return;
            }
            for i in from..all.len() {
                if chosen.iter().all(|&c| !conflict(&all[c], &all[i])) {
                    chosen.push(i);
                    rec(all, i + 1, chosen, best, conflict);
                    chosen.pop();
                }
            }
        }
        let mut best = 0;
        rec(&all, 0, &mut Vec::new(), &mut best, &conflict);
        best
    }

    #[test]
    fn fano_sized_packing_on_seven_points() {
        let s = greedy_packing(7, 3, cap(2, 1)).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(max_packing(7, 3, 1), 7);
    }

    #[test]
    fn floor_and_invariants_over_grid() {
        for (n, t, l) in [(8, 2, 1), (10, 3, 2), (20, 3, 2), (15, 4, 2), (12, 4, 3), (9, 3, 1)] {
            let s = greedy_packing(n, t, cap(l, 1)).unwrap();
            assert!(s.verify().is_ok());
            assert_eq!(s.level(), l);
            assert!(BigUint::from(s.len()) >= s.floor_guarantee(), "n={n} t={t} l={l} size={}", s.len());
        }
        assert_eq!(packing_floor(20, 3, 2), BigUint::from(22u8));
        assert_eq!(packing_floor(8, 2, 1), BigUint::from(2u8));
    }

    #[test]
    fn fractional_caps() {
        // cap 3/2 allows intersections of size at most 1
        let s = greedy_packing(10, 3, cap(3, 2)).unwrap();
        assert_eq!(s.level(), 2);
        assert!(s.verify().is_ok());
        assert_eq!(s, greedy_packing(10, 3, cap(2, 1)).unwrap().with_cap(cap(3, 2)));
        let s = greedy_packing(6, 1, cap(2, 3)).unwrap();
        assert_eq!(s.len(), 6);
    }

    impl SetSystem {
        fn with_cap(self, cap: Cap) -> Self {
            SetSystem { cap, ..self }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(greedy_packing(3, 0, cap(1, 1)).is_err());
        assert!(greedy_packing(3, 4, cap(1, 1)).is_err());
        assert!(greedy_packing(5, 2, cap(0, 1)).is_err());
        assert!(greedy_packing(5, 2, cap(5, 2)).is_err());
    }

    #[test]
    fn deterministic_and_shuffled() {
        let a = greedy_packing(12, 3, cap(2, 1)).unwrap();
        let b = greedy_packing(12, 3, cap(2, 1)).unwrap();
        assert_eq!(a, b);
        let c = greedy_packing_ordered(12, 3, cap(2, 1), PackingOrder::Shuffled(1)).unwrap();
        let d = greedy_packing_ordered(12, 3, cap(2, 1), PackingOrder::Shuffled(1)).unwrap();
        assert_eq!(c, d);
        assert!(c.verify().is_ok());
    }

    #[test]
    fn char_vector_dot_is_intersection() {
        let f = FieldSpec::new(101).unwrap();
        let s = greedy_packing(9, 4, cap(3, 1)).unwrap();
        let ps = char_vectors(&s, f);
        assert_eq!(ps.len(), s.len());
        for i in 0..s.len() {
            for j in 0..s.len() {
                let expect = intersection_size(&s.blocks[i], &s.blocks[j]) as u32;
                assert_eq!(dot(&ps.vectors[i], &ps.vectors[j]).unwrap(), expect);
            }
        }
    }

    #[test]
    fn char_vector_examples() {
        let f3 = FieldSpec::new(3).unwrap();
        let s = SetSystem { n: 4, t: 2, cap: cap(1, 1), blocks: vec![vec![1, 2], vec![3, 4]] };
        let ps = char_vectors(&s, f3);
        assert_eq!(ps.vectors[0].entries(), &[1, 1, 0, 0]);
        assert_eq!(ps.vectors[1].entries(), &[0, 0, 1, 1]);
        let empty = SetSystem { n: 4, t: 2, cap: cap(1, 1), blocks: vec![] };
        assert!(char_vectors(&empty, f3).is_empty());
        let one = SetSystem { n: 3, t: 2, cap: cap(1, 1), blocks: vec![vec![1, 3]] };
        assert_eq!(char_vectors(&one, f3).vectors[0].entries(), &[1, 0, 1]);
    }

    #[test]
    fn text_round_trip() {
        let s = greedy_packing(10, 3, cap(3, 2)).unwrap();
        let text = s.render();
        assert!(text.starts_with("n=10 t=3 cap=3/2\n"));
        let back: SetSystem = text.parse().unwrap();
        assert_eq!(back, s);
        assert!("n=4 t=2 cap=1/1\n1 2\n2 3\n".parse::<SetSystem>().is_err());
        assert!("n=4 t=2\n".parse::<SetSystem>().is_err());
    }

    #[test]
    fn t_subsets_count() {
        for n in 1..=9 {
            for t in 1..=n {
                let all = t_subsets(n, t);
                assert_eq!(BigUint::from(all.len()), binomial(n as i64, t as i64));
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}
