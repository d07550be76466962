//! Acceptance suite: every criterion is checked once through the library's
//! own reproduce run and once more by the independent checks below. One
//! PASS/FAIL line per criterion goes straight to stderr, past the test
//! harness's output capture.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use num_bigint::BigUint;
use orthofree::bounds::{bounds_for, s_upper, Side};
use orthofree::certify::{p_matrix_certificate, plant_self_orth_conflict, t_code_certificate};
use orthofree::constructions::{
    corner_free_set, s3_exact, s3_padded, s_lower_augmented, s_lower_basic, solve_ab, t_lower_augmented, t_lower_even,
    Alphabet, PointSet,
};
use orthofree::fqlin::FVec;
use orthofree::predicates::{all_right_equiv_witness, scan_set, Property};
use orthofree::reproduce::{run_criterion, Config, RunManifest, CRITERIA};
use orthofree::search::{exact_s, exact_t, SearchOptions};
use orthofree::setfamily::{greedy_packing, Cap};
use orthofree::FieldSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Direct pair check, independent of the library scanner.
fn pairwise_clean(ps: &PointSet, bad: impl Fn(&[u32], &[u32]) -> bool) -> bool {
    let v = &ps.vectors;
    (0..v.len()).all(|i| (i + 1..v.len()).all(|j| !bad(v[i].entries(), v[j].entries())))
}

fn self_orth(q: u32) -> impl Fn(&[u32], &[u32]) -> bool {
    move |x, y| x.iter().zip(y).map(|(&a, &b)| ((a + q - b) % q) as u64 * ((a + q - b) % q) as u64).sum::<u64>() % q as u64 == 0
}

fn distance_divisible(q: u32) -> impl Fn(&[u32], &[u32]) -> bool {
    move |x, y| {
        let d = x.iter().zip(y).filter(|(a, b)| a != b).count();
        d > 0 && d % q as usize == 0
    }
}

fn criterion_1() -> Vec<String> {
    let mut fails = Vec::new();
    for (n, expect) in [(2usize, 9usize), (5, 27)] {
        let r = exact_s(n, 3, SearchOptions::default()).unwrap();
        // C(n+3, 2) - 1
        let closed = binom(n as u64 + 3, 2) as usize - 1;
        let upper = s_upper(n, 3).unwrap().to_u64().unwrap() as usize;
        let s3 = s3_exact(n).unwrap();
        if r.optimum != expect || closed != expect || upper != expect || s3.len() != expect || !r.is_proven() {
            fails.push(format!("S({n},3): search={} closed={closed} s_upper={upper} s3={}", r.optimum, s3.len()));
        }
        if !pairwise_clean(&s3, self_orth(3)) || !pairwise_clean(&r.witness, self_orth(3)) {
            fails.push(format!("S({n},3): witness or s3_exact has a self-orthogonal difference"));
        }
    }
    fails
}

fn criterion_2() -> Vec<String> {
    let mut fails = Vec::new();
    for (n, expect) in [(3usize, 4usize), (5, 16), (6, 16), (4, 8)] {
        let r = exact_t(n, 3, SearchOptions::default()).unwrap();
        if r.optimum != expect || !r.is_proven() || !pairwise_clean(&r.witness, distance_divisible(3)) {
            fails.push(format!("T({n},3) = {} (expected {expect})", r.optimum));
        }
    }
    fails
}

fn criterion_3() -> Vec<String> {
    let mut fails = Vec::new();
    for q in [3u32, 5, 7] {
        for n in 1..=12usize {
            let mut sets = Vec::new();
            for k in [2usize, 3] {
                if let Ok(ps) = corner_free_set(n, q, k) {
                    sets.push(ps);
                }
            }
            if n + 1 >= q as usize {
                sets.push(s_lower_basic(n, q).unwrap());
                if solve_ab(n, q).unwrap().is_some() {
                    sets.push(s_lower_augmented(n, q).unwrap());
                }
            }
            if q == 3 && n % 3 == 2 {
                sets.push(s3_exact(n).unwrap());
            } else if q == 3 && n >= 3 {
                sets.push(s3_padded(n).unwrap());
            }
            for a in [Alphabet::default(), Alphabet::plus_minus_one(q)] {
                sets.push(t_lower_even(n, q, a).unwrap());
                if (n + 1) % q as usize == 0 {
                    sets.push(t_lower_augmented(n, q, a).unwrap());
                }
            }
            for ps in sets {
                let clean = match ps.claimed {
                    Property::SelfOrthDiff => pairwise_clean(&ps, self_orth(q)),
                    Property::DivisibleHamming => pairwise_clean(&ps, distance_divisible(q)),
                    p if ps.len() <= 300 => scan_set(&ps.vectors, p, None).unwrap().is_ok(),
                    _ => true,
                };
                if !clean {
                    fails.push(format!("{:?} violates {}", ps.provenance, ps.claimed));
                }
            }
        }
    }
    fails
}

fn criterion_4() -> Vec<String> {
    let mut fails = Vec::new();
    // proven-optimal values against every non-contradicted formula
    for (n, q) in [(2usize, 3u32), (5, 3), (3, 5), (2, 7)] {
        let r = exact_s(n, q, SearchOptions::default()).unwrap();
        for row in bounds_for(Property::SelfOrthDiff, n, q).unwrap() {
            let v = row.value.value.clone();
            let opt = BigUint::from(r.optimum);
            let ok = match row.side {
                Side::Upper => row.contradicted || opt <= v,
                Side::Lower => row.main_term || opt >= v,
            };
            if !ok {
                fails.push(format!("S({n},{q}) = {opt} vs {} = {v}", row.formula_id()));
            }
        }
    }
    for q in [3u32, 5, 7] {
        for n in 1..=8usize {
            let r = exact_t(n, q, SearchOptions::default()).unwrap();
            // sum of C(n, i) over even i <= q-1 is always a valid lower bound
            let lower: u64 = (0..q as u64).step_by(2).map(|i| binom(n as u64, i)).sum();
            let upper: u64 = (0..q as u64).map(|i| binom(n as u64, i)).sum();
            if (r.optimum as u64) < lower || r.optimum as u64 > upper {
                fails.push(format!("T({n},{q}) = {} outside [{lower}, {upper}]", r.optimum));
            }
        }
    }
    fails
}

fn criterion_5() -> Vec<String> {
    let mut fails = Vec::new();
    for n in [2usize, 5, 8] {
        let ps = s3_exact(n).unwrap();
        let c = p_matrix_certificate(&ps).unwrap();
        if !c.is_identity() || c.rank != ps.len() {
            fails.push(format!("s3_exact({n}) certificate rank {}", c.rank));
        }
    }
    let planted = plant_self_orth_conflict(&s3_exact(5).unwrap()).unwrap();
    let c = p_matrix_certificate(&planted).unwrap();
    if c.is_identity() || c.rank >= planted.len() {
        fails.push(format!("planted s3_exact(5): rank {} of {}", c.rank, planted.len()));
    }
    for (n, q) in [(5usize, 3u32), (9, 5), (6, 7)] {
        let ps = t_lower_augmented(n, q, Alphabet::plus_minus_one(q)).unwrap();
        let c = t_code_certificate(&ps).unwrap();
        if !c.is_identity() || c.rank != ps.len() {
            fails.push(format!("t_lower_augmented({n},{q}) rank {} of {}", c.rank, ps.len()));
        }
    }
    fails
}

fn criterion_6() -> Vec<String> {
    let mut fails = Vec::new();
    let f3 = FieldSpec::new(3).unwrap();
    let pts: Vec<FVec> = (0..9).map(|i| FVec::new(f3, vec![i / 3, i % 3]).unwrap()).collect();
    for x in &pts {
        for y in &pts {
            for z in &pts {
                if !all_right_equiv_witness(x, y, z).unwrap() {
                    fails.push(format!("equivalence fails at {x} {y} {z}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for q in [5u32, 7] {
        let f = FieldSpec::new(q).unwrap();
        for _ in 0..10_000 {
            let mut draw = || FVec::new(f, (0..3).map(|_| rng.gen_range(0..q)).collect()).unwrap();
            let (x, y, z) = (draw(), draw(), draw());
            if !all_right_equiv_witness(&x, &y, &z).unwrap() {
                fails.push(format!("equivalence fails at {x} {y} {z}"));
            }
        }
    }
    // integer arithmetic: sum (x_i - y_i)^2 against the distance
    for n in 1..=8u32 {
        for x in 0..1u32 << n {
            for y in 0..1u32 << n {
                let d = (x ^ y).count_ones() as i64;
                let bits = |w: u32, i: u32| (w >> i & 1) as i64;
                let zo: i64 = (0..n).map(|i| (bits(x, i) - bits(y, i)).pow(2)).sum();
                let pm: i64 = (0..n).map(|i| ((2 * bits(x, i) - 1) - (2 * bits(y, i) - 1)).pow(2)).sum();
                if zo.rem_euclid(3) != d.rem_euclid(3) || pm != 4 * d {
                    fails.push(format!("identity fails at n={n} x={x:b} y={y:b}"));
                }
            }
        }
    }
    fails
}

fn criterion_7() -> Vec<String> {
    let mut fails = Vec::new();
    for (n, t, l) in [(8u64, 2u64, 1u64), (10, 3, 2), (20, 3, 2), (15, 4, 2)] {
        let sys = greedy_packing(n as usize, t as usize, Cap::from_integer(l)).unwrap();
        let floor = binom(n, l).div_ceil(binom(t, l).pow(2));
        let worst = (0..sys.blocks.len())
            .flat_map(|i| (i + 1..sys.blocks.len()).map(move |j| (i, j)))
            .map(|(i, j)| sys.blocks[i].iter().filter(|e| sys.blocks[j].contains(e)).count() as u64)
            .max()
            .unwrap_or(0);
        if (sys.len() as u64) < floor || worst >= l {
            fails.push(format!("packing ({n},{t},{l}): size {} floor {floor} max overlap {worst}", sys.len()));
        }
    }
    fails
}

fn run_binary(dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_orthofree"))
        .args(["reproduce", "--out"])
        .arg(dir)
        .env("ORTHOFREE_WORKERS", "2")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn criterion_8() -> Vec<String> {
    let mut fails = Vec::new();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ca, sa) = run_binary(a.path());
    let (cb, sb) = run_binary(b.path());
    if ca != 0 || cb != 0 {
        fails.push(format!("reproduce exit codes {ca}, {cb}"));
    }
    if sa != sb {
        fails.push("stdout differs between runs".into());
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).ok();
        if Some(&x) != y.as_ref() {
            fails.push(format!("{name:?} differs"));
        }
    }
    let text = std::fs::read_to_string(a.path().join("manifest.json")).unwrap();
    let manifest = RunManifest::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    if manifest.outputs.len() + 1 != names.len() || !manifest.check_dir(b.path()).is_empty() {
        fails.push("manifest digests do not match the second run".into());
    }
    fails
}

#[test]
fn acceptance() {
    let independent: [fn() -> Vec<String>; 8] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8];
    let config = Config::default();
    let mut all = true;
    let mut log = std::io::stderr().lock();
    for (c, check) in CRITERIA.iter().zip(independent) {
        let report = run_criterion(c.id, &config);
        let extra = check();
        let passed = report.passed() && extra.is_empty();
        all &= passed;
        let _ = writeln!(
            log,
            "criterion {} [{}] {}: {} ({} library checks, {} library failures, {} independent failures)",
            c.id,
            c.key,
            c.title,
            if passed { "PASS" } else { "FAIL" },
            report.checks,
            report.failures.len(),
            extra.len()
        );
        for f in report.failures.iter().chain(&extra).take(5) {
            let _ = writeln!(log, "    {f}");
        }
    }
    assert!(all, "some acceptance criteria failed");
}
