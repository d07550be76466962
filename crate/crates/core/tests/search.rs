use orthofree::predicates::{scan_set, Property};
use orthofree::search::{exact, exact_r, exact_s, exact_t, ConflictInstance, SearchOptions, Status, Universe};
use orthofree::{FVec, FieldSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn right_angle(q: i64, x: &[i64], y: &[i64], z: &[i64]) -> bool {
    x.iter().zip(y).zip(z).map(|((a, b), c)| (a - c) * (b - c)).sum::<i64>().rem_euclid(q) == 0
}

#[test]
fn r_2_3_matches_subset_enumeration() {
    let pts: Vec<Vec<i64>> = (0..9).map(|i| vec![i / 3, i % 3]).collect();
    let mut best = 0;
    for mask in 0u32..1 << 9 {
        let s: Vec<&Vec<i64>> = (0..9).filter(|i| mask >> i & 1 == 1).map(|i| &pts[i]).collect();
        let free = s.iter().enumerate().all(|(a, x)| {
            s.iter().enumerate().all(|(b, y)| {
                s.iter().enumerate().all(|(c, z)| a == b || b == c || a == c || !right_angle(3, x, y, z))
            })
        });
        if free {
            best = best.max(s.len());
        }
    }
    let r = exact_r(2, 3, SearchOptions::default()).unwrap();
    assert_eq!(r.optimum, best);
    assert_eq!(best, 3);
}

#[test]
fn witnesses_pass_verification() {
    for r in [
        exact_s(3, 3, SearchOptions::default()).unwrap(),
        exact_t(5, 5, SearchOptions::default()).unwrap(),
        exact_r(3, 3, SearchOptions::default()).unwrap(),
    ] {
        assert_eq!(r.status, Status::ProvenOptimal);
        assert_eq!(r.witness.len(), r.optimum);
        assert!(scan_set(&r.witness.vectors, r.witness.claimed, None).unwrap().is_ok(), "{}", r.label);
    }
}

#[test]
fn parallel_and_sequential_witnesses_agree() {
    for (n, q) in [(4usize, 3u32), (5, 3), (2, 5), (3, 5)] {
        let par = exact_s(n, q, SearchOptions::default()).unwrap();
        let seq = exact_s(n, q, SearchOptions::sequential()).unwrap();
        assert_eq!(par.witness_indices, seq.witness_indices, "S({n},{q})");
    }
    for n in 3..=8 {
        let par = exact_t(n, 3, SearchOptions::default()).unwrap();
        let seq = exact_t(n, 3, SearchOptions::sequential()).unwrap();
        assert_eq!(par.witness_indices, seq.witness_indices, "T({n},3)");
    }
}

#[test]
fn repeated_runs_give_identical_witnesses() {
    let a = exact_s(5, 3, SearchOptions::default()).unwrap();
    let b = exact_s(5, 3, SearchOptions::default()).unwrap();
    assert_eq!(a.witness, b.witness);
}

#[test]
fn anchoring_keeps_the_optimum() {
    let f = FieldSpec::new(3).unwrap();
    let full = Universe::Full { field: f, n: 2 };
    for p in [Property::SelfOrthDiff, Property::RightAngle, Property::AllRightTriangle, Property::KRightCorner(2)] {
        let inst = ConflictInstance::new(&full, p, "anchor").unwrap();
        assert!(inst.symmetric);
        let on = exact(&inst, SearchOptions::sequential()).unwrap();
        let off = exact(&inst, SearchOptions { anchor: false, ..SearchOptions::sequential() }).unwrap();
        assert_eq!(on.optimum, off.optimum, "{p}");
    }
}

#[test]
fn coordinate_permutations_keep_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = FieldSpec::new(3).unwrap();
    let base = Universe::Full { field: f, n: 3 }.vertices().unwrap();
    for p in [Property::SelfOrthDiff, Property::RightAngle] {
        let reference = exact(&ConflictInstance::new(&Universe::Full { field: f, n: 3 }, p, "ref").unwrap(), SearchOptions::sequential())
            .unwrap()
            .optimum;
        for _ in 0..3 {
            let mut perm: Vec<usize> = (0..3).collect();
            perm.shuffle(&mut rng);
            let mut order: Vec<usize> = (0..base.len()).collect();
            order.shuffle(&mut rng);
            let vertices: Vec<FVec> = order
                .iter()
                .map(|&i| FVec::new(f, perm.iter().map(|&c| base[i].entries()[c]).collect()).unwrap())
                .collect();
            let inst = ConflictInstance { vertices, property: p, symmetric: false, label: "perm".into() };
            assert_eq!(exact(&inst, SearchOptions::sequential()).unwrap().optimum, reference, "{p}");
        }
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let r = exact_s(4, 3, SearchOptions { budget: Some(3), ..SearchOptions::sequential() }).unwrap();
    assert_eq!(r.status, Status::BudgetExhausted);
    assert!(r.optimum <= 15);
    assert!(scan_set(&r.witness.vectors, Property::SelfOrthDiff, None).unwrap().is_ok());
}
