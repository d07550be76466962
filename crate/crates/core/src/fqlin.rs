//! Prime-field scalar and vector arithmetic, plus the exact big-integer
//! combinatorics used by every bound evaluator.
//!
//! Residues are stored fully reduced as `u32`, so vector equality is plain
//! bitwise equality. Big integers only ever appear inside [`BoundValue`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted. Products of two residues must fit in a `u64`
/// without overflow, and the search universes are tiny anyway.
pub const MAX_MODULUS: u32 = 1 << 16;

/// An odd prime modulus `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    q: u32,
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        if q < 3 {
            return Err(Error::Domain(format!("q={q}: modulus must be an odd prime >= 3")));
        }
        if q > MAX_MODULUS {
            return Err(Error::Domain(format!("q={q}: modulus exceeds {MAX_MODULUS}")));
        }
        if !is_prime(q) {
            if is_prime_power(q) {
                return Err(Error::Unsupported(format!(
                    "q={q} is a prime power; only prime fields are supported"
                )));
            }
            return Err(Error::Domain(format!("q={q} is not prime")));
        }
        Ok(FieldSpec { q })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.q as u64) as u32
    }

    /// Reduce a signed integer into `[0, q)`.
    #[inline]
    pub fn reduce_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            self.q - b + a
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1u32 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.q == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// `a^(q-1)`: 1 for nonzero `a`, 0 for zero.
    #[inline]
    pub fn nonzero_indicator(self, a: u32) -> u32 {
        self.pow(a, self.q as u64 - 1)
    }
}

impl TryFrom<u32> for FieldSpec {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        FieldSpec::new(q)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.q
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// Deterministic trial-division primality check (moduli are at most 2^16).
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn is_prime_power(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n % d == 0).unwrap();
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

/// Tag for the scalar operations exposed through [`fe_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// `a^b`, with `b` read as an ordinary exponent.
    Pow,
    /// Inverse of `a`; `b` is ignored.
    Inv,
}

pub fn fe_arith(op: FieldOp, a: u32, b: u32, field: FieldSpec) -> Result<u32> {
    let q = field.q();
    if a >= q || (op != FieldOp::Pow && op != FieldOp::Inv && b >= q) {
        return Err(Error::Domain(format!("operands must be reduced mod {q}")));
    }
    Ok(match op {
        FieldOp::Add => field.add(a, b),
        FieldOp::Sub => field.sub(a, b),
        FieldOp::Mul => field.mul(a, b),
        FieldOp::Pow => field.pow(a, b as u64),
        FieldOp::Inv => field.inv(a)?,
    })
}

/// A vector of `F_q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVec {
    field: FieldSpec,
    entries: Box<[u32]>,
}

impl FVec {
    /// Builds a vector from already-reduced residues.
    pub fn new(field: FieldSpec, entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("vector length must be at least 1".into()));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= field.q()) {
            return Err(Error::Domain(format!("entry {bad} is not reduced mod {}", field.q())));
        }
        Ok(FVec { field, entries: entries.into_boxed_slice() })
    }

    /// Builds a vector from arbitrary integers, reducing each mod q.
    pub fn from_ints(field: FieldSpec, values: &[i64]) -> Result<Self> {
        FVec::new(field, values.iter().map(|&v| field.reduce_i64(v)).collect())
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        FVec { field, entries: vec![0; n.max(1)].into_boxed_slice() }
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(field: FieldSpec, n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        FVec { field, entries: e.into_boxed_slice() }
    }

    pub fn constant(field: FieldSpec, n: usize, value: u32) -> Self {
        FVec { field, entries: vec![value % field.q(); n].into_boxed_slice() }
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    fn check_compatible(&self, other: &FVec) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Mismatch(format!("fields differ: {} vs {}", self.field, other.field)));
        }
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!("lengths differ: {} vs {}", self.len(), other.len())));
        }
        Ok(())
    }

    fn zip_with(&self, other: &FVec, f: impl Fn(u32, u32) -> u32) -> Result<FVec> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(other.entries.iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(FVec { field: self.field, entries })
    }

    pub fn add(&self, other: &FVec) -> Result<FVec> {
        let f = self.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FVec) -> Result<FVec> {
        vsub(self, other)
    }

    pub fn scale(&self, c: u32) -> FVec {
        let f = self.field;
        FVec { field: f, entries: self.entries.iter().map(|&a| f.mul(a, c % f.q())).collect() }
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    /// Comma-separated residues, as used by the vector text format.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 2);
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&e.to_string());
        }
        s
    }
}

impl fmt::Display for FVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_csv())
    }
}

/// Dot product of raw residue slices; caller guarantees equal length.
#[inline]
pub(crate) fn dot_raw(field: FieldSpec, x: &[u32], y: &[u32]) -> u32 {
    let acc: u64 = x.iter().zip(y).map(|(&a, &b)| a as u64 * b as u64).sum();
    field.reduce(acc)
}

/// `<x - z, y - z>` on raw slices without allocating.
#[inline]
pub(crate) fn diff_dot_raw(field: FieldSpec, x: &[u32], y: &[u32], z: &[u32]) -> u32 {
    let q = field.q() as u64;
    let acc: u64 = x
        .iter()
        .zip(y)
        .zip(z)
        .map(|((&a, &b), &c)| ((a as u64 + q - c as u64) % q) * ((b as u64 + q - c as u64) % q))
        .sum();
    field.reduce(acc)
}

/// `<x - y, x - y>` on raw slices.
#[inline]
pub(crate) fn self_dot_diff_raw(field: FieldSpec, x: &[u32], y: &[u32]) -> u32 {
    let q = field.q() as u64;
    let acc: u64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let d = (a as u64 + q - b as u64) % q;
            d * d
        })
        .sum();
    field.reduce(acc)
}

pub fn dot(x: &FVec, y: &FVec) -> Result<u32> {
    x.check_compatible(y)?;
    Ok(dot_raw(x.field, &x.entries, &y.entries))
}

pub fn vsub(x: &FVec, y: &FVec) -> Result<FVec> {
    let f = x.field;
    x.zip_with(y, |a, b| f.sub(a, b))
}

/// An exact nonnegative integer tagged with the formula that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundValue {
    pub value: BigUint,
    pub formula_id: &'static str,
}

impl BoundValue {
    pub fn new(formula_id: &'static str, value: BigUint) -> Self {
        BoundValue { value, formula_id }
    }

    /// The value as a `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.value).ok()
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Exact `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binomial_value(n: i64, k: i64) -> BoundValue {
    BoundValue::new("binomial", binomial(n, k))
}

/// Number of monomials in `n` variables of total degree at most `d`.
pub fn monomial_count(n: i64, d: i64) -> Result<BoundValue> {
    if n < 1 || d < 0 {
        return Err(Error::Domain(format!("monomial_count needs n >= 1, d >= 0 (got n={n}, d={d})")));
    }
    Ok(BoundValue::new("monomial_count", binomial(n + d, d)))
}

/// A list of vectors in the `q=<q> n=<n>` text format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFile {
    pub field: FieldSpec,
    pub n: usize,
    pub vectors: Vec<FVec>,
}

impl VectorFile {
    pub fn render(&self) -> String {
        let mut out = format!("q={} n={}\n", self.field.q(), self.n);
        for v in &self.vectors {
            out.push_str(&v.to_csv());
            out.push('\n');
        }
        out
    }
}

impl FromStr for VectorFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty vector file".into()))?;
        let (q, n) = parse_header(header)?;
        let field = FieldSpec::new(q)?;
        let mut vectors = Vec::new();
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            let entries = line
                .split(',')
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("line {}: bad residue {tok:?}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if entries.len() != n {
                return Err(Error::Parse(format!(
                    "line {}: expected {n} entries, found {}",
                    lineno + 1,
                    entries.len()
                )));
            }
            vectors.push(
                FVec::new(field, entries).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?,
            );
        }
        Ok(VectorFile { field, n, vectors })
    }
}

fn parse_header(header: &str) -> Result<(u32, usize)> {
    let bad = || Error::Parse(format!("bad header {header:?}, expected `q=<q> n=<n>`"));
    let mut parts = header.split(' ');
    let q = parts.next().and_then(|p| p.strip_prefix("q=")).ok_or_else(bad)?;
    let n = parts.next().and_then(|p| p.strip_prefix("n=")).ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    let q = q.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(Error::Parse("n must be at least 1".into()));
    }
    Ok((q, n))
}
