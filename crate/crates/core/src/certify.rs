//! Evaluation-matrix certificates for the polynomial method, and rank over
//! `F_q`.
//!
//! Slice rank of general tensors is never computed. What is checked are the
//! finite facts the dimension arguments rest on: an evaluation matrix that
//! is the identity (so the polynomials are linearly independent), and its
//! rank.

use num_bigint::BigUint;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::constructions::PointSet;
use crate::error::{Error, Result};
use crate::fqlin::{binomial, dot_raw, self_dot_diff_raw, BoundValue, FVec, FieldSpec};

/// Dense matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    data: Vec<u32>,
}

impl FqMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        FqMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = FqMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<u32>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Mismatch("ragged matrix rows".into()));
            }
            data.extend(row.into_iter().map(|e| field.reduce(e as u64)));
        }
        Ok(FqMatrix { field, rows: r, cols: c, data })
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.q();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u32::from(i == j)))
    }

    /// First off-diagonal nonzero in row-major order.
    pub fn first_off_diagonal(&self) -> Option<(usize, usize)> {
        (0..self.rows).flat_map(|i| (0..self.cols).map(move |j| (i, j))).find(|&(i, j)| i != j && self.get(i, j) != 0)
    }

    /// SHA-256 over `q rows cols` followed by one comma-separated line per row.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{} {} {}\n", self.field.q(), self.rows, self.cols));
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            h.update(line.join(","));
            h.update("\n");
        }
        hex::encode(h.finalize())
    }
}

/// Rank by Gaussian elimination. Columns are processed left to right and the
/// pivot is the first remaining row with a nonzero entry in that column.
pub fn rank_gf(m: &FqMatrix) -> usize {
    let f = m.field;
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(p) = (rank..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        if p != rank {
            for c in 0..a.cols {
                a.data.swap(p * a.cols + c, rank * a.cols + c);
            }
        }
        let inv = f.inv(a.get(rank, col)).expect("pivot is nonzero");
        for c in col..a.cols {
            let v = f.mul(a.get(rank, c), inv);
            a.set(rank, c, v);
        }
        for r in rank + 1..a.rows {
            let factor = a.get(r, col);
            if factor == 0 {
                continue;
            }
            for c in col..a.cols {
                let v = f.sub(a.get(r, c), f.mul(factor, a.get(rank, c)));
                a.set(r, c, v);
            }
        }
        rank += 1;
    }
    rank
}

/// `M[i][j] = p_{a_i}(a_j) = 1 - <a_j - a_i, a_j - a_i>^(q-1)`.
pub fn p_eval_matrix(set: &[FVec]) -> Result<FqMatrix> {
    let Some(first) = set.first() else {
        return Err(Error::Domain("empty set has no evaluation matrix".into()));
    };
    let f = first.field();
    let m = set.len();
    let mut out = FqMatrix::zeros(f, m, m);
    for i in 0..m {
        for j in 0..m {
            let d = self_dot_diff_raw(f, set[j].entries(), set[i].entries());
            out.set(i, j, f.sub(1, f.nonzero_indicator(d)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: &'static str,
    pub passed: bool,
    /// First counterexample (indices into the set), when the clause failed.
    pub witness: Option<Vec<usize>>,
}

impl Clause {
    fn pass(name: &'static str) -> Self {
        Clause { name, passed: true, witness: None }
    }

    fn check(name: &'static str, witness: Option<Vec<usize>>) -> Self {
        Clause { name, passed: witness.is_none(), witness }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "witness": self.witness.as_ref().map(|w| w.iter().map(|i| i.to_string()).collect::<Vec<_>>()),
        })
    }
}

/// Outcome of checking the hypotheses and the conclusion of the
/// few-dot-products lemma on a concrete set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagCertificate {
    pub clauses: Vec<Clause>,
    pub matrix: FqMatrix,
    pub size: usize,
    /// `2 C(n + |R|, |R|)`.
    pub bound: BigUint,
}

impl DiagCertificate {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }
}

/// Checks: (i) `<a, a> = alpha` for all `a`; (ii) `<x, y> ∈ R` for distinct
/// pairs; (iii) `T(x, y) = prod_{r in R} (<x, y> - r)` is diagonal with
/// nonzero diagonal on `A × A`; (iv) `|A| <= 2 C(n + |R|, |R|)`.
pub fn lemma_diag_certificate(field: FieldSpec, n: usize, set: &[FVec], alpha: u32, values: &[u32]) -> Result<DiagCertificate> {
    let q = field.q();
    let mut r: Vec<u32> = values.iter().map(|&v| v % q).collect();
    r.sort_unstable();
    r.dedup();
    let alpha = alpha % q;
    if r.contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} must not lie in R")));
    }
    if let Some(v) = set.iter().find(|v| v.field() != field || v.len() != n) {
        return Err(Error::Mismatch(format!("vector {v} is not in {field}^{n}")));
    }
    let m = set.len();
    let gram = |i: usize, j: usize| dot_raw(field, set[i].entries(), set[j].entries());

    let norms = (0..m).find(|&i| gram(i, i) != alpha).map(|i| vec![i]);
    let pairs = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .find(|&(i, j)| !r.contains(&gram(i, j)))
        .map(|(i, j)| vec![i, j]);

    let mut t = FqMatrix::zeros(field, m, m);
    for i in 0..m {
        for j in 0..m {
            let g = gram(i, j);
            let v = r.iter().fold(1u32, |acc, &rv| field.mul(acc, field.sub(g, rv)));
            t.set(i, j, v);
        }
    }
    let diagonal = t
        .first_off_diagonal()
        .map(|(i, j)| vec![i, j])
        .or_else(|| (0..m).find(|&i| t.get(i, i) == 0).map(|i| vec![i, i]));

    let bound = binomial((n + r.len()) as i64, r.len() as i64) * 2u8;
    let size_ok = BigUint::from(m) <= bound;

    Ok(DiagCertificate {
        clauses: vec![
            Clause::check("norms-equal-alpha", norms),
            Clause::check("dot-products-in-R", pairs),
            Clause::check("T-diagonal-nonzero", diagonal),
            if size_ok { Clause::pass("size-bound") } else { Clause { name: "size-bound", passed: false, witness: None } },
        ],
        matrix: t,
        size: m,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixCertificate {
    pub matrix: FqMatrix,
    pub rank: usize,
    pub size: usize,
}

impl MatrixCertificate {
    fn new(matrix: FqMatrix) -> Self {
        let rank = rank_gf(&matrix);
        MatrixCertificate { size: matrix.rows, matrix, rank }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn full_rank(&self) -> bool {
        self.rank == self.size
    }

    pub fn clauses(&self) -> Vec<Clause> {
        vec![
            Clause::check("identity", self.matrix.first_off_diagonal().map(|(i, j)| vec![i, j])),
            Clause { name: "full-rank", passed: self.full_rank(), witness: None },
        ]
    }
}

/// Evaluation matrix of the `p_a` polynomials over the set, with its rank.
pub fn p_matrix_certificate(ps: &PointSet) -> Result<MatrixCertificate> {
    Ok(MatrixCertificate::new(p_eval_matrix(&ps.vectors)?))
}

/// For a code embedded as `±1` vectors: `M[i][j] = f_i(a_j)` with
/// `f_i(x) = 1 - (2n - sum_j 2 a_{i,j} x_j)^(q-1)`.
pub fn t_code_certificate(ps: &PointSet) -> Result<MatrixCertificate> {
    let f = ps.field;
    let q = f.q();
    if ps.is_empty() {
        return Err(Error::Domain("empty set has no evaluation matrix".into()));
    }
    if let Some(v) = ps.vectors.iter().find(|v| v.entries().iter().any(|&e| e != 1 && e != q - 1)) {
        return Err(Error::Domain(format!("vector {v} has an entry other than ±1")));
    }
    let m = ps.len();
    let two_n = f.reduce(2 * ps.n as u64);
    let mut out = FqMatrix::zeros(f, m, m);
    for i in 0..m {
        for j in 0..m {
            let s = f.mul(2, dot_raw(f, ps.vectors[i].entries(), ps.vectors[j].entries()));
            out.set(i, j, f.sub(1, f.nonzero_indicator(f.sub(two_n, s))));
        }
    }
    Ok(MatrixCertificate::new(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    All,
    Even,
}

/// Number of multilinear monomials of degree at most `q - 1` (or of even
/// degree at most `q - 1`) in `n` variables.
pub fn multilinear_dimension(n: usize, q: u32, parity: Parity) -> Result<BoundValue> {
    FieldSpec::new(q)?;
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let step = match parity {
        Parity::All => 1,
        Parity::Even => 2,
    };
    let v = (0..q as i64).step_by(step).map(|i| binomial(n as i64, i)).sum();
    Ok(BoundValue::new("multilinear_dimension", v))
}

/// A nonzero self-orthogonal vector of `F_q^n` supported on the first three
/// coordinates (one exists once `n >= 3`), smallest in lexicographic order
/// of its support entries.
pub fn self_orthogonal_vector(field: FieldSpec, n: usize) -> Option<FVec> {
    let q = field.q();
    let width = n.min(3);
    let total = (q as usize).pow(width as u32);
    (1..total).find_map(|mut idx| {
        let mut e = vec![0u32; n];
        for slot in e[..width].iter_mut().rev() {
            *slot = (idx % q as usize) as u32;
            idx /= q as usize;
        }
        let v = FVec::new(field, e).ok()?;
        (dot_raw(field, v.entries(), v.entries()) == 0).then_some(v)
    })
}

/// Adds `a + d` for the first member `a` and self-orthogonal `d` such that
/// the result is new. The planted vector always has a self-orthogonal
/// difference with `a`.
pub fn plant_self_orth_conflict(ps: &PointSet) -> Option<PointSet> {
    let d = self_orthogonal_vector(ps.field, ps.n)?;
    let mut mult = 1;
    while mult < ps.field.q() {
        let step = d.scale(mult);
        for a in &ps.vectors {
            let cand = a.add(&step).ok()?;
            if !ps.vectors.contains(&cand) {
                return Some(ps.with_planted(cand));
            }
        }
        mult += 1;
    }
    None
}

/// Adds a word at Hamming distance `q` from some member by swapping the
/// two symbols in `q` coordinates. Needs `n >= q`.
pub fn plant_hamming_conflict(ps: &PointSet, a: u32, b: u32) -> Option<PointSet> {
    let q = ps.field.q() as usize;
    if ps.n < q {
        return None;
    }
    for base in &ps.vectors {
        for start in 0..=ps.n - q {
            let mut e = base.entries().to_vec();
            for s in &mut e[start..start + q] {
                *s = if *s == a { b } else { a };
            }
            let cand = FVec::new(ps.field, e).ok()?;
            if !ps.vectors.contains(&cand) {
                return Some(ps.with_planted(cand));
            }
        }
    }
    None
}
