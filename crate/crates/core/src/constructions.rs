//! Explicit lower-bound sets, each tagged with the configuration it avoids.

use std::collections::HashSet;

use serde_json::json;

use crate::error::{Error, Result};
use crate::fqlin::{FVec, FieldSpec, VectorFile};
use crate::predicates::{scan_set, Property, ScanOutcome};
use crate::setfamily::{char_vectors, greedy_packing, Cap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub construction: String,
    pub params: Vec<(String, String)>,
}

/// A list of distinct vectors plus where it came from and what it claims.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub field: FieldSpec,
    pub n: usize,
    pub vectors: Vec<FVec>,
    pub provenance: Provenance,
    pub claimed: Property,
}

impl PointSet {
    pub fn new(
        field: FieldSpec,
        n: usize,
        vectors: Vec<FVec>,
        construction: &str,
        params: Vec<(&str, String)>,
        claimed: Property,
    ) -> Self {
        PointSet {
            field,
            n,
            vectors,
            provenance: Provenance {
                construction: construction.to_string(),
                params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            },
            claimed,
        }
    }

    /// Wraps a plain vector list (e.g. one read from a file).
    pub fn from_file(file: VectorFile, claimed: Property) -> Self {
        let params = vec![("q", file.field.q().to_string()), ("n", file.n.to_string())];
        PointSet::new(file.field, file.n, file.vectors, "file", params, claimed)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Scans for the claimed property.
    pub fn scan(&self, budget: Option<u64>) -> Result<ScanOutcome> {
        scan_set(&self.vectors, self.claimed, budget)
    }

    pub fn all_distinct(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.len());
        self.vectors.iter().all(|v| seen.insert(v))
    }

    pub fn to_vector_file(&self) -> VectorFile {
        VectorFile { field: self.field, n: self.n, vectors: self.vectors.clone() }
    }

    pub fn provenance_json(&self) -> serde_json::Value {
        let params: serde_json::Map<String, serde_json::Value> =
            self.provenance.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "schema": 1,
            "construction": self.provenance.construction,
            "params": params,
            "claimed_property": self.claimed.tag(),
            "k": self.claimed.k().map(|k| k.to_string()),
            "size": self.len().to_string(),
        })
    }

    /// Same vectors, with one extra vector appended and the provenance marked.
    pub fn with_planted(&self, extra: FVec) -> PointSet {
        let mut out = self.clone();
        out.vectors.push(extra);
        out.provenance.construction = format!("{}+planted", self.provenance.construction);
        out
    }
}

fn field(q: u32) -> Result<FieldSpec> {
    FieldSpec::new(q)
}

/// Parameters of the corner-free family: block size `t = floor(kq/(2k-1))`
/// and intersection cap `(k-1)t/k`.
pub fn corner_parameters(q: u32, k: usize) -> (usize, Cap) {
    let (q, k) = (q as u64, k as u64);
    let t = k * q / (2 * k - 1);
    (t as usize, Cap::new((k - 1) * t, k))
}

pub fn corner_free_set(n: usize, q: u32, k: usize) -> Result<PointSet> {
    let fs = field(q)?;
    if k < 2 {
        return Err(Error::Domain(format!("k={k}: corners need k >= 2")));
    }
    let (t, cap) = corner_parameters(q, k);
    if n < t {
        return Err(Error::Domain(format!("n={n} < t={t}: need n >= floor(kq/(2k-1))")));
    }
    let sys = greedy_packing(n, t, cap)?;
    let mut ps = char_vectors(&sys, fs);
    ps.provenance = Provenance {
        construction: "corner-free".into(),
        params: vec![
            ("n".into(), n.to_string()),
            ("q".into(), q.to_string()),
            ("k".into(), k.to_string()),
            ("t".into(), t.to_string()),
            ("cap".into(), format!("{}/{}", cap.numer(), cap.denom())),
        ],
    };
    ps.claimed = Property::KRightCorner(k);
    Ok(ps)
}

pub fn right_angle_free_set(n: usize, q: u32) -> Result<PointSet> {
    let mut ps = corner_free_set(n, q, 2)?;
    ps.provenance.construction = "right-angle-free".into();
    ps.claimed = Property::RightAngle;
    Ok(ps)
}

pub fn standard_basis_set(n: usize, q: u32) -> Result<PointSet> {
    let fs = field(q)?;
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let vectors = (0..n).map(|i| FVec::basis(fs, n, i)).collect();
    Ok(PointSet::new(fs, n, vectors, "standard-basis", vec![("n", n.to_string()), ("q", q.to_string())], Property::RightAngle))
}

/// All vectors with exactly `count` entries equal to `minor` and the rest
/// equal to `major`, in lexicographic order.
fn two_valued(fs: FieldSpec, n: usize, count: usize, minor: u32, major: u32) -> Vec<FVec> {
    if count > n {
        return Vec::new();
    }
    let mut out: Vec<FVec> = positions(n, count)
        .into_iter()
        .map(|pos| {
            let mut e = vec![major; n];
            for p in pos {
                e[p] = minor;
            }
            FVec::new(fs, e).expect("residues are reduced")
        })
        .collect();
    out.sort();
    out
}

/// All `count`-subsets of `0..n`.
fn positions(n: usize, count: usize) -> Vec<Vec<usize>> {
    if count == 0 {
        return vec![Vec::new()];
    }
    crate::setfamily::t_subsets(n, count)
        .into_iter()
        .map(|s| s.into_iter().map(|e| e - 1).collect())
        .collect()
}

/// Concatenates classes, failing on the first vector that appears twice.
fn disjoint_union(classes: Vec<Vec<FVec>>) -> Result<Vec<FVec>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for class in classes {
        for v in class {
            if !seen.insert(v.clone()) {
                return Err(Error::Overlap(v.to_string()));
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// 0/1 vectors of weight exactly `q - 1`.
pub fn s_lower_basic(n: usize, q: u32) -> Result<PointSet> {
    let fs = field(q)?;
    let w = q as usize - 1;
    if n < w {
        return Err(Error::Domain(format!("n={n} < q-1={w}")));
    }
    Ok(PointSet::new(
        fs,
        n,
        two_valued(fs, n, w, 1, 0),
        "s-lower-basic",
        vec![("n", n.to_string()), ("q", q.to_string())],
        Property::SelfOrthDiff,
    ))
}

/// Lexicographically smallest `(a, b)`, `a != b`, with
/// `(n + 2) b^2 = 2a^2 - 2a + 1` over `F_q`.
pub fn solve_ab(n: usize, q: u32) -> Result<Option<(u32, u32)>> {
    let fs = field(q)?;
    let c = fs.reduce(n as u64 + 2);
    for a in 0..q {
        let rhs = fs.add(fs.sub(fs.mul(2, fs.mul(a, a)), fs.mul(2, a)), 1);
        for b in 0..q {
            if a != b && fs.mul(c, fs.mul(b, b)) == rhs {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Weight-`(q-1)` 0/1 vectors together with all vectors having `q - 2`
/// entries `a` and the rest `b`.
pub fn s_lower_augmented(n: usize, q: u32) -> Result<PointSet> {
    let fs = field(q)?;
    let w = q as usize - 1;
    if n < w {
        return Err(Error::Domain(format!("n={n} < q-1={w}")));
    }
    let (a, b) = solve_ab(n, q)?.ok_or(Error::NoAbSolution { n, q })?;
    let first = two_valued(fs, n, w, 1, 0);
    let second = two_valued(fs, n, q as usize - 2, a, b);
    let vectors = disjoint_union(vec![first, second])?;
    Ok(PointSet::new(
        fs,
        n,
        vectors,
        "s-lower-augmented",
        vec![("n", n.to_string()), ("q", q.to_string()), ("a", a.to_string()), ("b", b.to_string())],
        Property::SelfOrthDiff,
    ))
}

fn s3_classes(n: usize) -> Result<Vec<FVec>> {
    let fs = field(3)?;
    disjoint_union(vec![
        two_valued(fs, n, 2, 1, 0),
        two_valued(fs, n, 1, 0, 2),
        two_valued(fs, n, 1, 1, 2),
        two_valued(fs, n, 1, 0, 1),
        vec![FVec::constant(fs, n, 0)],
        vec![FVec::constant(fs, n, 2)],
    ])
}

/// The six-class set in `F_3^n` of size `C(n+3, 2) - 1`, for `n = 2 mod 3`.
pub fn s3_exact(n: usize) -> Result<PointSet> {
    if n < 2 || n % 3 != 2 {
        return Err(Error::Domain(format!("n={n}: n ≡ 2 mod 3 required")));
    }
    let vectors = s3_classes(n)?;
    Ok(PointSet::new(field(3)?, n, vectors, "s3-exact", vec![("n", n.to_string())], Property::SelfOrthDiff))
}

/// [`s3_exact`] on the first `n-1` (n = 0 mod 3) or `n-2` (n = 1 mod 3)
/// coordinates, remaining coordinates fixed to 0.
pub fn s3_padded(n: usize) -> Result<PointSet> {
    let inner = match n % 3 {
        _ if n < 3 => return Err(Error::Domain(format!("n={n}: n >= 3 required"))),
        0 => n - 1,
        1 => n - 2,
        _ => return Err(Error::Domain(format!("n={n}: n ≡ 0 or 1 mod 3 required (use s3-exact)"))),
    };
    let fs = field(3)?;
    let vectors = s3_classes(inner)?
        .into_iter()
        .map(|v| {
            let mut e = v.entries().to_vec();
            e.resize(n, 0);
            FVec::new(fs, e).expect("residues are reduced")
        })
        .collect();
    Ok(PointSet::new(fs, n, vectors, "s3-padded", vec![("n", n.to_string())], Property::SelfOrthDiff))
}

/// The two symbols of a binary code, embedded in `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub a: u32,
    pub b: u32,
}

impl Default for Alphabet {
    /// `a = 1`, `b = 0`: the `a`-count of a word is its weight.
    fn default() -> Self {
        Alphabet { a: 1, b: 0 }
    }
}

impl Alphabet {
    /// `a -> +1`, `b -> -1`.
    pub fn plus_minus_one(q: u32) -> Self {
        Alphabet { a: 1, b: q - 1 }
    }

    fn check(self, fs: FieldSpec) -> Result<()> {
        if self.a == self.b || self.a >= fs.q() || self.b >= fs.q() {
            return Err(Error::Domain(format!("alphabet ({}, {}) must be two distinct residues mod {}", self.a, self.b, fs.q())));
        }
        Ok(())
    }
}

/// Re-encodes a word set into another alphabet, symbol by symbol.
pub fn relabel(ps: &PointSet, from: Alphabet, to: Alphabet) -> Result<PointSet> {
    let mut out = ps.clone();
    out.vectors = ps
        .vectors
        .iter()
        .map(|v| {
            let e = v
                .entries()
                .iter()
                .map(|&s| match s {
                    s if s == from.a => Ok(to.a),
                    s if s == from.b => Ok(to.b),
                    s => Err(Error::Domain(format!("symbol {s} not in alphabet ({}, {})", from.a, from.b))),
                })
                .collect::<Result<Vec<_>>>()?;
            FVec::new(ps.field, e)
        })
        .collect::<Result<_>>()?;
    Ok(out)
}

fn even_a_classes(fs: FieldSpec, n: usize, q: u32, ab: Alphabet) -> Vec<Vec<FVec>> {
    (0..=(q as usize - 1).min(n)).step_by(2).map(|i| two_valued(fs, n, i, ab.a, ab.b)).collect()
}

/// Words in `{a,b}^n` whose number of `a`s is even and at most `q - 1`.
pub fn t_lower_even(n: usize, q: u32, alphabet: Alphabet) -> Result<PointSet> {
    let fs = field(q)?;
    alphabet.check(fs)?;
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let vectors = disjoint_union(even_a_classes(fs, n, q, alphabet))?;
    Ok(PointSet::new(
        fs,
        n,
        vectors,
        "t-lower-even",
        vec![("n", n.to_string()), ("q", q.to_string()), ("a", alphabet.a.to_string()), ("b", alphabet.b.to_string())],
        Property::DivisibleHamming,
    ))
}

/// [`t_lower_even`] plus the words whose number of `b`s is odd and at most
/// `q - 2`; requires `n = -1 mod q`.
pub fn t_lower_augmented(n: usize, q: u32, alphabet: Alphabet) -> Result<PointSet> {
    let fs = field(q)?;
    alphabet.check(fs)?;
    if n < 1 || (n + 1) % q as usize != 0 {
        return Err(Error::Domain(format!("n={n}: n ≡ -1 mod {q} required")));
    }
    let mut classes = even_a_classes(fs, n, q, alphabet);
    for j in (1..=(q as usize - 2).min(n)).step_by(2) {
        classes.push(two_valued(fs, n, j, alphabet.b, alphabet.a));
    }
    let vectors = disjoint_union(classes)?;
    Ok(PointSet::new(
        fs,
        n,
        vectors,
        "t-lower-augmented",
        vec![("n", n.to_string()), ("q", q.to_string()), ("a", alphabet.a.to_string()), ("b", alphabet.b.to_string())],
        Property::DivisibleHamming,
    ))
}

/// Names accepted by [`construct_by_name`].
pub const CONSTRUCTION_NAMES: &[&str] = &[
    "corner-free",
    "right-angle-free",
    "standard-basis",
    "s-lower-basic",
    "s-lower-augmented",
    "s3-exact",
    "s3-padded",
    "t-lower-even",
    "t-lower-augmented",
];

/// Dispatches a construction by its CLI name. `q` defaults to 3 for the
/// `s3-*` constructions, which ignore it otherwise.
pub fn construct_by_name(name: &str, n: usize, q: Option<u32>, k: Option<usize>) -> Result<PointSet> {
    let need_q = || q.ok_or_else(|| Error::Domain(format!("{name} needs --q")));
    match name {
        "corner-free" => {
            let k = k.ok_or_else(|| Error::Domain("corner-free needs --k".into()))?;
            corner_free_set(n, need_q()?, k)
        }
        "right-angle-free" => right_angle_free_set(n, need_q()?),
        "standard-basis" => standard_basis_set(n, need_q()?),
        "s-lower-basic" => s_lower_basic(n, need_q()?),
        "s-lower-augmented" => s_lower_augmented(n, need_q()?),
        "s3-exact" | "s3-padded" => {
            if let Some(q) = q.filter(|&q| q != 3) {
                return Err(Error::Domain(format!("{name} is defined over F_3 only (got q={q})")));
            }
            if name == "s3-exact" {
                s3_exact(n)
            } else {
                s3_padded(n)
            }
        }
        "t-lower-even" => t_lower_even(n, need_q()?, Alphabet::default()),
        "t-lower-augmented" => t_lower_augmented(n, need_q()?, Alphabet::default()),
        other => Err(Error::Unknown { what: "construction", name: other.to_string() }),
    }
}
