//! The acceptance grid as a runnable, self-checking report.
//!
//! Every criterion writes a plain-text log; the logs, the summary report and
//! a [`RunManifest`] with their SHA-256 digests are the run's outputs. Wall
//! times are kept on [`CriterionReport`] only and never reach the files, so
//! sequential runs are byte-for-byte repeatable.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::bounds::{bounds_for, s_lower_augmented_size, s_lower_basic_size, s_upper, s3_lower, t_lower_general, t_lower_special, Side};
use crate::certify::{
    lemma_diag_certificate, multilinear_dimension, p_matrix_certificate, plant_hamming_conflict, plant_self_orth_conflict,
    t_code_certificate, Parity,
};
use crate::constructions::{
    corner_free_set, right_angle_free_set, s3_exact, s3_padded, s_lower_augmented, s_lower_basic, standard_basis_set,
    t_lower_augmented, t_lower_even, Alphabet, PointSet,
};
use crate::error::{Error, Result};
use crate::fqlin::{dot, vsub, FVec, FieldSpec};
use crate::predicates::{all_right_equiv_witness, hamming, ScanOutcome};
use crate::search::{exact_all_right, exact_corner, exact_r, exact_s, exact_t, SearchOptions, SearchResult};
use crate::setfamily::{greedy_packing, Cap};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Moduli and orders of the construction grid.
const GRID_Q: [u32; 3] = [3, 5, 7];
const GRID_K: [usize; 2] = [2, 3];
const GRID_MAX_N: usize = 12;
/// Largest set handed to a triple (or wider) scan.
const TUPLE_SCAN_LIMIT: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub key: &'static str,
    pub title: &'static str,
}

pub const CRITERIA: [Criterion; 8] = [
    Criterion { id: 1, key: "S", title: "exact S values" },
    Criterion { id: 2, key: "T", title: "exact T values" },
    Criterion { id: 3, key: "grid", title: "construction/verification grid" },
    Criterion { id: 4, key: "bounds", title: "bound consistency sweep" },
    Criterion { id: 5, key: "certs", title: "certificate suite" },
    Criterion { id: 6, key: "identities", title: "algebraic identities" },
    Criterion { id: 7, key: "packing", title: "packing floor" },
    Criterion { id: 8, key: "determinism", title: "sequential determinism" },
];

/// Resolves a comma-separated list of criterion ids (`3`) or keys (`T`).
pub fn parse_only(spec: &str) -> Result<Vec<u8>> {
    let mut ids = Vec::new();
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let c = CRITERIA
            .iter()
            .find(|c| c.key.eq_ignore_ascii_case(tok) || tok.parse::<u8>() == Ok(c.id))
            .ok_or_else(|| Error::Unknown { what: "criterion", name: tok.to_string() })?;
        if !ids.contains(&c.id) {
            ids.push(c.id);
        }
    }
    if ids.is_empty() {
        return Err(Error::Domain("empty criterion list".into()));
    }
    ids.sort_unstable();
    Ok(ids)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Criterion ids to run; `None` runs all of them.
    pub only: Option<Vec<u8>>,
    pub sequential: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config { only: None, sequential: true }
    }
}

impl Config {
    fn ids(&self) -> Vec<u8> {
        self.only.clone().unwrap_or_else(|| CRITERIA.iter().map(|c| c.id).collect())
    }

    fn search_opts(&self) -> SearchOptions {
        SearchOptions { sequential: self.sequential, ..SearchOptions::default() }
    }

    /// The command that reproduces this run (output location omitted).
    pub fn command_line(&self) -> Vec<String> {
        let mut cmd = vec!["orthofree".to_string(), "reproduce".to_string()];
        if let Some(ids) = &self.only {
            cmd.push("--only".into());
            cmd.push(ids.iter().map(u8::to_string).collect::<Vec<_>>().join(","));
        }
        if !self.sequential {
            cmd.push("--parallel".into());
        }
        cmd
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub checks: u64,
    pub failures: Vec<String>,
    pub log: String,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    /// One line: id, key, verdict and number of checks.
    pub fn summary_line(&self) -> String {
        let c = self.criterion;
        format!(
            "criterion {} [{}] {}: {} ({} checks, {} failures)",
            c.id,
            c.key,
            c.title,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks,
            self.failures.len()
        )
    }

    fn file_name(&self) -> String {
        format!("criterion-{}-{}.log", self.criterion.id, self.criterion.key)
    }
}

/// Accumulates checks and log lines for one criterion.
#[derive(Default)]
struct Ctx {
    checks: u64,
    failures: Vec<String>,
    log: String,
}

impl Ctx {
    fn line(&mut self, s: impl AsRef<str>) {
        self.log.push_str(s.as_ref());
        self.log.push('\n');
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            let msg = what();
            self.line(format!("FAIL {msg}"));
            self.failures.push(msg);
        }
    }

    fn fail_err(&mut self, what: &str, e: &Error) {
        self.check(false, || format!("{what}: {e}"));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub params: BTreeMap<String, String>,
    pub version: String,
    /// File name to hex SHA-256 of its bytes.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": 1,
            "command_line": self.command_line,
            "params": self.params,
            "version": self.version,
            "outputs": self.outputs,
        })
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("manifest: missing or malformed {what}"));
        if v.get("schema").and_then(|s| s.as_u64()) != Some(1) {
            return Err(bad("schema"));
        }
        let strings = |key: &str| -> Result<Vec<String>> {
            v.get(key)
                .and_then(|a| a.as_array())
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad(key)))
                .collect()
        };
        let map = |key: &str| -> Result<BTreeMap<String, String>> {
            v.get(key)
                .and_then(|m| m.as_object())
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|(k, s)| Ok((k.clone(), s.as_str().ok_or_else(|| bad(key))?.to_string())))
                .collect()
        };
        Ok(RunManifest {
            command_line: strings("command_line")?,
            params: map("params")?,
            version: v.get("version").and_then(|s| s.as_str()).ok_or_else(|| bad("version"))?.to_string(),
            outputs: map("outputs")?,
        })
    }

    /// Recomputes each listed digest from files in `dir`; returns the names
    /// that differ or are missing.
    pub fn check_dir(&self, dir: &Path) -> Vec<String> {
        self.outputs
            .iter()
            .filter(|(name, digest)| std::fs::read(dir.join(name)).map(|b| sha256_hex(&b) != **digest).unwrap_or(true))
            .map(|(name, _)| name.clone())
            .collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Reproduction {
    pub config: Config,
    pub reports: Vec<CriterionReport>,
    /// Output files (name to contents) except the manifest.
    pub files: BTreeMap<String, String>,
    pub manifest: RunManifest,
}

impl Reproduction {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(CriterionReport::passed)
    }

    pub fn report_text(&self) -> &str {
        &self.files["report.txt"]
    }

    /// Writes every output plus `manifest.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        std::fs::write(dir.join("manifest.json"), self.manifest.render())?;
        Ok(())
    }
}

/// Runs the selected criteria and assembles report, logs and manifest.
pub fn reproduce(config: &Config) -> Result<Reproduction> {
    let ids = config.ids();
    if let Some(bad) = ids.iter().find(|&&id| !(1..=8).contains(&id)) {
        return Err(Error::Unknown { what: "criterion", name: bad.to_string() });
    }
    let reports: Vec<CriterionReport> = ids.iter().map(|&id| run_criterion(id, config)).collect();
    Ok(assemble(config, reports))
}

fn assemble(config: &Config, reports: Vec<CriterionReport>) -> Reproduction {
    let mut files = BTreeMap::new();
    let mut report = String::new();
    let _ = writeln!(report, "orthofree {VERSION} acceptance report");
    for r in &reports {
        report.push_str(&r.summary_line());
        report.push('\n');
        for f in &r.failures {
            let _ = writeln!(report, "  - {f}");
        }
        files.insert(r.file_name(), r.log.clone());
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(report, "{passed}/{} criteria passed", reports.len());
    files.insert("report.txt".to_string(), report);

    let mut params = BTreeMap::new();
    params.insert("sequential".to_string(), config.sequential.to_string());
    params.insert(
        "criteria".to_string(),
        config.ids().iter().map(u8::to_string).collect::<Vec<_>>().join(","),
    );
    params.insert("grid_q".to_string(), "3,5,7".to_string());
    params.insert("grid_k".to_string(), "2,3".to_string());
    params.insert("grid_max_n".to_string(), GRID_MAX_N.to_string());
    let outputs = files.iter().map(|(k, v)| (k.clone(), sha256_hex(v.as_bytes()))).collect();
    let manifest = RunManifest { command_line: config.command_line(), params, version: VERSION.to_string(), outputs };
    Reproduction { config: config.clone(), reports, files, manifest }
}

pub fn run_criterion(id: u8, config: &Config) -> CriterionReport {
    let criterion = *CRITERIA.iter().find(|c| c.id == id).expect("criterion id in 1..=8");
    let start = Instant::now();
    let mut ctx = Ctx::default();
    match id {
        1 => exact_s_values(&mut ctx, config),
        2 => exact_t_values(&mut ctx, config),
        3 => construction_grid(&mut ctx),
        4 => bound_consistency(&mut ctx, config),
        5 => certificates(&mut ctx),
        6 => identities(&mut ctx),
        7 => packing(&mut ctx),
        8 => determinism(&mut ctx, config),
        _ => unreachable!(),
    }
    CriterionReport { criterion, checks: ctx.checks, failures: ctx.failures, log: ctx.log, elapsed: start.elapsed() }
}

fn scan_clean(ctx: &mut Ctx, ps: &PointSet, what: &str) {
    match ps.scan(None) {
        Ok(ScanOutcome::Ok) => ctx.check(true, String::new),
        Ok(other) => ctx.check(false, || format!("{what}: scan for {} gave {other:?}", ps.claimed)),
        Err(e) => ctx.fail_err(what, &e),
    }
}

fn searched(ctx: &mut Ctx, label: &str, r: Result<SearchResult>) -> Option<SearchResult> {
    match r {
        Ok(r) => {
            ctx.line(format!(
                "{label}: optimum={} status={} nodes={} witness={:?}",
                r.optimum,
                r.status.as_str(),
                r.nodes_expanded,
                r.witness_indices
            ));
            ctx.check(r.is_proven(), || format!("{label}: search not proven optimal"));
            scan_clean(ctx, &r.witness, &format!("{label} witness"));
            Some(r)
        }
        Err(e) => {
            ctx.fail_err(label, &e);
            None
        }
    }
}

fn exact_s_values(ctx: &mut Ctx, config: &Config) {
    for (n, expect) in [(2usize, 9usize), (5, 27)] {
        let label = format!("S({n},3)");
        let Some(r) = searched(ctx, &label, exact_s(n, 3, config.search_opts())) else { continue };
        ctx.check(r.optimum == expect, || format!("{label} = {} (expected {expect})", r.optimum));
        let upper = s_upper(n, 3).map(|b| b.value).unwrap_or_default();
        ctx.check(BigUint::from(r.optimum) == upper, || format!("{label} = {} but s_upper = {upper}", r.optimum));
        match s3_exact(n) {
            Ok(ps) => {
                ctx.line(format!("s3_exact({n}): size={}", ps.len()));
                ctx.check(ps.len() == r.optimum, || format!("s3_exact({n}) has {} vectors", ps.len()));
                ctx.check(ps.all_distinct(), || format!("s3_exact({n}) repeats a vector"));
                scan_clean(ctx, &ps, &format!("s3_exact({n})"));
            }
            Err(e) => ctx.fail_err("s3_exact", &e),
        }
    }
}

fn exact_t_values(ctx: &mut Ctx, config: &Config) {
    for (n, expect) in [(3usize, 4usize), (5, 16), (6, 16), (4, 8)] {
        let label = format!("T({n},3)");
        let Some(r) = searched(ctx, &label, exact_t(n, 3, config.search_opts())) else { continue };
        ctx.check(r.optimum == expect, || format!("{label} = {} (expected {expect})", r.optimum));
    }
}

/// Every construction applicable at `(n, q)`, plus the corner sets per `k`.
fn grid_constructions(n: usize, q: u32) -> Vec<(String, Result<PointSet>)> {
    let mut out = Vec::new();
    for k in GRID_K {
        if n >= crate::constructions::corner_parameters(q, k).0 {
            out.push((format!("corner-free(n={n},q={q},k={k})"), corner_free_set(n, q, k)));
        }
    }
    if n >= crate::constructions::corner_parameters(q, 2).0 {
        out.push((format!("right-angle-free(n={n},q={q})"), right_angle_free_set(n, q)));
    }
    out.push((format!("standard-basis(n={n},q={q})"), standard_basis_set(n, q)));
    if n + 1 >= q as usize {
        out.push((format!("s-lower-basic(n={n},q={q})"), s_lower_basic(n, q)));
        if matches!(crate::constructions::solve_ab(n, q), Ok(Some(_))) {
            out.push((format!("s-lower-augmented(n={n},q={q})"), s_lower_augmented(n, q)));
        }
    }
    if q == 3 {
        match n % 3 {
            2 => out.push((format!("s3-exact(n={n})"), s3_exact(n))),
            _ if n >= 3 => out.push((format!("s3-padded(n={n})"), s3_padded(n))),
            _ => {}
        }
    }
    for (tag, alphabet) in [("0/1", Alphabet::default()), ("±1", Alphabet::plus_minus_one(q))] {
        out.push((format!("t-lower-even(n={n},q={q},{tag})"), t_lower_even(n, q, alphabet)));
        if (n + 1) % q as usize == 0 {
            out.push((format!("t-lower-augmented(n={n},q={q},{tag})"), t_lower_augmented(n, q, alphabet)));
        }
    }
    out
}

fn construction_grid(ctx: &mut Ctx) {
    let mut skipped = 0;
    for q in GRID_Q {
        for n in 1..=GRID_MAX_N {
            for (label, ps) in grid_constructions(n, q) {
                let ps = match ps {
                    Ok(ps) => ps,
                    Err(e) => {
                        ctx.fail_err(&label, &e);
                        continue;
                    }
                };
                ctx.check(ps.all_distinct(), || format!("{label}: repeated vector"));
                if ps.claimed.arity() > 2 && ps.len() > TUPLE_SCAN_LIMIT {
                    skipped += 1;
                    ctx.line(format!("{label}: size={} claim={} scan skipped (size cap)", ps.len(), ps.claimed));
                    continue;
                }
                scan_clean(ctx, &ps, &label);
                ctx.line(format!("{label}: size={} claim={} clean", ps.len(), ps.claimed));
            }
        }
    }
    ctx.line(format!("tuple scans skipped above {TUPLE_SCAN_LIMIT} vectors: {skipped}"));
}

/// The lower-bound formula a construction realizes, when there is one.
fn matching_lower(ps: &PointSet) -> Option<Result<BigUint>> {
    let (n, q) = (ps.n, ps.field.q());
    let v = match ps.provenance.construction.as_str() {
        "s-lower-basic" => s_lower_basic_size(n, q),
        "s-lower-augmented" => s_lower_augmented_size(n, q),
        "s3-exact" => s3_lower(n),
        "t-lower-even" => t_lower_general(n, q),
        "t-lower-augmented" => t_lower_special(n, q),
        _ => return None,
    };
    Some(v.map(|b| b.value))
}

fn bound_consistency(ctx: &mut Ctx, config: &Config) {
    for q in GRID_Q {
        for n in 1..=GRID_MAX_N {
            for (label, ps) in grid_constructions(n, q) {
                let Ok(ps) = ps else { continue };
                let size = BigUint::from(ps.len());
                let rows = match bounds_for(ps.claimed, n, q) {
                    Ok(rows) => rows,
                    Err(e) => {
                        ctx.fail_err(&label, &e);
                        continue;
                    }
                };
                for row in rows.iter().filter(|r| r.side == Side::Upper) {
                    if row.contradicted {
                        ctx.line(format!("{label}: {} = {} contradicted at this point, not compared", row.formula_id(), row.value.value));
                        continue;
                    }
                    ctx.check(size <= row.value.value, || {
                        format!("{label}: size {size} exceeds {} = {}", row.formula_id(), row.value.value)
                    });
                }
                if let Some(lower) = matching_lower(&ps) {
                    match lower {
                        Ok(v) => ctx.check(size >= v, || format!("{label}: size {size} below its formula value {v}")),
                        Err(e) => ctx.fail_err(&label, &e),
                    }
                }
                if ps.provenance.construction == "corner-free" || ps.provenance.construction == "right-angle-free" {
                    let k = ps.claimed.k().unwrap_or(2);
                    let (t, cap) = crate::constructions::corner_parameters(q, k);
                    let floor = crate::setfamily::packing_floor(n, t, crate::setfamily::cap_level(cap));
                    ctx.check(size >= floor, || format!("{label}: size {size} below packing floor {floor}"));
                }
                ctx.line(format!("{label}: size={size} within bounds"));
            }
        }
    }

    let opts = config.search_opts();
    let mut runs: Vec<(String, Result<SearchResult>)> = Vec::new();
    for (q, max_n) in [(3u32, 5usize), (5, 3), (7, 2)] {
        for n in 1..=max_n {
            runs.push((format!("S({n},{q})"), exact_s(n, q, opts)));
        }
    }
    for q in GRID_Q {
        for n in 1..=8 {
            runs.push((format!("T({n},{q})"), exact_t(n, q, opts)));
        }
    }
    for n in 1..=3 {
        runs.push((format!("R({n},3)"), exact_r(n, 3, opts)));
    }
    for (n, q) in [(1, 3), (2, 3), (1, 5)] {
        runs.push((format!("AllRight({n},{q})"), exact_all_right(n, q, opts)));
    }
    runs.push(("Corner3(2,3)".to_string(), exact_corner(2, 3, 3, opts)));

    for (label, r) in runs {
        let Some(r) = searched(ctx, &label, r) else { continue };
        let (n, q) = (r.witness.n, r.witness.field.q());
        let rows = match bounds_for(r.witness.claimed, n, q) {
            Ok(rows) => rows,
            Err(e) => {
                ctx.fail_err(&label, &e);
                continue;
            }
        };
        let opt = BigUint::from(r.optimum);
        for row in &rows {
            match row.side {
                Side::Upper if row.contradicted => {
                    ctx.line(format!("{label}: {} = {} contradicted at this point, not compared", row.formula_id(), row.value.value))
                }
                Side::Upper => ctx.check(opt <= row.value.value, || {
                    format!("{label} = {opt} exceeds {} = {}", row.formula_id(), row.value.value)
                }),
                // asymptotic main terms are not finite lower bounds
                Side::Lower if row.main_term => {}
                Side::Lower => ctx.check(opt >= row.value.value, || {
                    format!("{label} = {opt} below {} = {}", row.formula_id(), row.value.value)
                }),
            }
        }
    }
}

fn certify_matrix(ctx: &mut Ctx, label: &str, ps: &PointSet, t_code: bool) {
    let built = if t_code { t_code_certificate(ps) } else { p_matrix_certificate(ps) };
    let cert = match built {
        Ok(c) => c,
        Err(e) => return ctx.fail_err(label, &e),
    };
    ctx.check(cert.is_identity(), || format!("{label}: evaluation matrix is not the identity"));
    ctx.check(cert.full_rank(), || format!("{label}: rank {} < {}", cert.rank, cert.size));
    ctx.line(format!("{label}: size={} identity={} rank={}", ps.len(), cert.is_identity(), cert.rank));

    let (planted, dim) = if t_code {
        let q = ps.field.q();
        let parity = if ps.n % q as usize == 0 { Parity::Even } else { Parity::All };
        (plant_hamming_conflict(ps, 1, q - 1), multilinear_dimension(ps.n, q, parity).map(|b| b.value))
    } else {
        (plant_self_orth_conflict(ps), s_upper(ps.n, ps.field.q()).map(|b| b.value))
    };
    let Some(planted) = planted else {
        ctx.line(format!("{label}: no conflict can be planted"));
        return;
    };
    let pcert = if t_code { t_code_certificate(&planted) } else { p_matrix_certificate(&planted) };
    let pcert = match pcert {
        Ok(c) => c,
        Err(e) => return ctx.fail_err(label, &e),
    };
    ctx.check(!pcert.is_identity(), || format!("{label}+planted: matrix is still the identity"));
    let dim = dim.unwrap_or_default();
    if BigUint::from(planted.len()) > dim {
        ctx.check(!pcert.full_rank(), || format!("{label}+planted: rank {} not below {}", pcert.rank, planted.len()));
        ctx.line(format!("{label}+planted: size={} > dimension {dim}, rank={}", planted.len(), pcert.rank));
    } else {
        ctx.line(format!("{label}+planted: identity lost"));
    }
}

fn certificates(ctx: &mut Ctx) {
    for q in GRID_Q {
        for n in 1..=GRID_MAX_N {
            let mut sets: Vec<(String, Result<PointSet>, bool)> = Vec::new();
            if n + 1 >= q as usize {
                sets.push((format!("s-lower-basic(n={n},q={q})"), s_lower_basic(n, q), false));
                if matches!(crate::constructions::solve_ab(n, q), Ok(Some(_))) {
                    sets.push((format!("s-lower-augmented(n={n},q={q})"), s_lower_augmented(n, q), false));
                }
            }
            if q == 3 && n % 3 == 2 {
                sets.push((format!("s3-exact(n={n})"), s3_exact(n), false));
            } else if q == 3 && n >= 3 {
                sets.push((format!("s3-padded(n={n})"), s3_padded(n), false));
            }
            let pm = Alphabet::plus_minus_one(q);
            sets.push((format!("t-lower-even(n={n},q={q},±1)"), t_lower_even(n, q, pm), true));
            if (n + 1) % q as usize == 0 {
                sets.push((format!("t-lower-augmented(n={n},q={q},±1)"), t_lower_augmented(n, q, pm), true));
            }
            for (label, ps, t_code) in sets {
                match ps {
                    Ok(ps) => certify_matrix(ctx, &label, &ps, t_code),
                    Err(e) => ctx.fail_err(&label, &e),
                }
            }

            // norms q-1, pairwise products in {0..q-2}
            if n + 1 >= q as usize && n <= 8 {
                let label = format!("lemma-diag s-lower-basic(n={n},q={q})");
                let values: Vec<u32> = (0..q - 1).collect();
                match s_lower_basic(n, q)
                    .and_then(|ps| lemma_diag_certificate(ps.field, n, &ps.vectors, q - 1, &values))
                {
                    Ok(c) => {
                        ctx.check(c.passed(), || format!("{label}: failed clauses {:?}", c.clauses));
                        ctx.line(format!("{label}: size={} bound={} passed={}", c.size, c.bound, c.passed()));
                    }
                    Err(e) => ctx.fail_err(&label, &e),
                }
            }
        }
    }
}

fn words(n: usize, a: u32, b: u32) -> Vec<Vec<u32>> {
    (0..1usize << n).map(|m| (0..n).map(|i| if m >> (n - 1 - i) & 1 == 1 { a } else { b }).collect()).collect()
}

fn identities(ctx: &mut Ctx) {
    let f3 = FieldSpec::new(3).expect("3 is prime");
    let plane: Vec<FVec> = (0..9).map(|i| FVec::new(f3, vec![i / 3, i % 3]).expect("reduced")).collect();
    let mut count = 0;
    for x in &plane {
        for y in &plane {
            for z in &plane {
                let ok = all_right_equiv_witness(x, y, z).unwrap_or(false);
                ctx.check(ok, || format!("all-right equivalence fails at {x} {y} {z}"));
                count += 1;
            }
        }
    }
    ctx.line(format!("all-right equivalence: exhaustive F_3^2, {count} triples"));

    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11_7196);
    for q in [5u32, 7] {
        let f = FieldSpec::new(q).expect("prime");
        let n = 4;
        let draw = |rng: &mut ChaCha8Rng| FVec::new(f, (0..n).map(|_| rng.gen_range(0..q)).collect()).expect("reduced");
        let mut all_right = 0;
        for _ in 0..10_000 {
            let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let ok = all_right_equiv_witness(&x, &y, &z).unwrap_or(false);
            ctx.check(ok, || format!("all-right equivalence fails at {x} {y} {z}"));
            if crate::predicates::is_all_right_triangle(&x, &y, &z).unwrap_or(false) {
                all_right += 1;
            }
        }
        ctx.line(format!("all-right equivalence: 10000 random triples in F_{q}^{n}, {all_right} all-right"));
    }

    for n in 1..=8 {
        let zo: Vec<FVec> = words(n, 1, 0).into_iter().map(|w| FVec::new(f3, w).expect("reduced")).collect();
        for x in &zo {
            for y in &zo {
                let d = vsub(x, y).and_then(|v| dot(&v, &v));
                let h = hamming(x, y).map(|h| (h % 3) as u32);
                ctx.check(matches!((&d, &h), (Ok(d), Ok(h)) if d == h), || {
                    format!("<x-y,x-y> != d(x,y) mod 3 at {x} {y}")
                });
            }
        }
        for q in GRID_Q {
            let f = FieldSpec::new(q).expect("prime");
            let pm: Vec<FVec> = words(n, 1, q - 1).into_iter().map(|w| FVec::new(f, w).expect("reduced")).collect();
            for x in &pm {
                for y in &pm {
                    let d = vsub(x, y).and_then(|v| dot(&v, &v));
                    let h = hamming(x, y).map(|h| f.reduce(4 * h as u64));
                    ctx.check(matches!((&d, &h), (Ok(d), Ok(h)) if d == h), || {
                        format!("<x-y,x-y> != 4 d(x,y) mod {q} at {x} {y}")
                    });
                }
            }
        }
        ctx.line(format!("hamming identities: n={n} exhaustive ({} pairs per alphabet)", 1usize << (2 * n)));
    }
}

fn packing(ctx: &mut Ctx) {
    for (n, t, l) in [(8usize, 2usize, 1u64), (10, 3, 2), (20, 3, 2), (15, 4, 2)] {
        let label = format!("packing(n={n},t={t},l={l})");
        match greedy_packing(n, t, Cap::from_integer(l)) {
            Ok(sys) => {
                let floor = sys.floor_guarantee();
                ctx.check(sys.verify().is_ok(), || format!("{label}: intersection cap violated"));
                ctx.check(BigUint::from(sys.len()) >= floor, || format!("{label}: size {} below floor {floor}", sys.len()));
                ctx.line(format!("{label}: size={} floor={floor}", sys.len()));
            }
            Err(e) => ctx.fail_err(&label, &e),
        }
    }
}

/// Runs the other selected criteria twice in sequential mode and compares
/// every output byte for byte.
fn determinism(ctx: &mut Ctx, config: &Config) {
    let ids: Vec<u8> = config.ids().into_iter().filter(|&id| id != 8).collect();
    let ids = if ids.is_empty() { vec![1, 2, 7] } else { ids };
    let inner = Config { only: Some(ids.clone()), sequential: true };
    let run = || assemble(&inner, ids.iter().map(|&id| run_criterion(id, &inner)).collect());
    let (a, b) = (run(), run());
    for (name, body) in &a.files {
        let same = b.files.get(name) == Some(body);
        ctx.check(same, || format!("{name} differs between runs"));
        ctx.line(format!("{name}: {}", sha256_hex(body.as_bytes())));
    }
    ctx.check(a.files.len() == b.files.len(), || "runs produced different file sets".into());
    let (ma, mb) = (a.manifest.render(), b.manifest.render());
    ctx.check(ma == mb, || "manifests differ between runs".into());
    let round = serde_json::from_str(&ma).map_err(Error::from).and_then(|v| RunManifest::from_json(&v));
    ctx.check(round.as_ref().ok() == Some(&a.manifest), || "manifest does not round-trip".into());
    ctx.line(format!("manifest.json: {}", sha256_hex(ma.as_bytes())));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_parsing() {
        assert_eq!(parse_only("T").unwrap(), vec![2]);
        assert_eq!(parse_only("7,1,s").unwrap(), vec![1, 7]);
        assert!(matches!(parse_only("9"), Err(Error::Unknown { .. })));
        assert!(parse_only("nope").is_err());
        assert!(parse_only("").is_err());
    }

    #[test]
    fn small_subset_passes_and_manifest_round_trips() {
        let cfg = Config { only: Some(vec![2, 7]), sequential: true };
        let rep = reproduce(&cfg).unwrap();
        assert!(rep.all_passed(), "{}", rep.report_text());
        let v: serde_json::Value = serde_json::from_str(&rep.manifest.render()).unwrap();
        assert_eq!(RunManifest::from_json(&v).unwrap(), rep.manifest);
        assert_eq!(rep.manifest.outputs.len(), 3);
        assert_eq!(rep.manifest.command_line, ["orthofree", "reproduce", "--only", "2,7"]);

        let dir = tempfile::tempdir().unwrap();
        rep.write_to(dir.path()).unwrap();
        assert!(rep.manifest.check_dir(dir.path()).is_empty());
        std::fs::write(dir.path().join("report.txt"), "tampered").unwrap();
        assert_eq!(rep.manifest.check_dir(dir.path()), ["report.txt"]);
    }
}
