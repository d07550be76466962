use num_bigint::BigUint;
use orthofree::certify::{rank_gf, FqMatrix};
use orthofree::predicates::{scan_set, Property, ScanOutcome};
use orthofree::setfamily::{greedy_packing_ordered, Cap, PackingOrder, SetSystem};
use orthofree::{FVec, FieldSpec};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![3u32, 5, 7]).prop_map(|q| FieldSpec::new(q).unwrap())
}

fn point_set(max: usize) -> impl Strategy<Value = Vec<FVec>> {
    (field(), 1usize..4).prop_flat_map(move |(f, n)| {
        prop::collection::btree_set(prop::collection::vec(0..f.q(), n), 0..max)
            .prop_map(move |s| s.into_iter().map(|e| FVec::new(f, e).unwrap()).collect())
    })
}

fn sq_diff(x: &FVec, y: &FVec, z: &FVec) -> u64 {
    let q = x.field().q() as i64;
    let e = |v: &FVec, i: usize| v.entries()[i] as i64;
    (0..x.len()).map(|i| (e(x, i) - e(z, i)) * (e(y, i) - e(z, i))).sum::<i64>().rem_euclid(q) as u64
}

proptest! {
    #[test]
    fn right_angle_scan_matches_brute_force(set in point_set(9)) {
        let m = set.len();
        let brute = (0..m).any(|z| (0..m).any(|x| (0..m).any(|y| {
            x != y && x != z && y != z && sq_diff(&set[x], &set[y], &set[z]) == 0
        })));
        let out = scan_set(&set, Property::RightAngle, None).unwrap();
        prop_assert_eq!(brute, !out.is_ok());
        if let ScanOutcome::Violation(v) = out {
            prop_assert!(v.replay().unwrap());
        }
    }

    #[test]
    fn scans_ignore_translation(set in point_set(8), shift in prop::collection::vec(0u32..7, 3)) {
        prop_assume!(!set.is_empty());
        let f = set[0].field();
        let t = FVec::new(f, shift[..set[0].len()].iter().map(|&s| s % f.q()).collect()).unwrap();
        let moved: Vec<FVec> = set.iter().map(|v| v.add(&t).unwrap()).collect();
        for p in [Property::RightAngle, Property::SelfOrthDiff, Property::AllRightTriangle, Property::KRightCorner(2)] {
            prop_assert_eq!(
                scan_set(&set, p, None).unwrap().is_ok(),
                scan_set(&moved, p, None).unwrap().is_ok()
            );
        }
    }

    #[test]
    fn shuffled_packings_respect_cap_and_floor(n in 4usize..14, t in 2usize..5, l in 1u64..3, seed in any::<u64>()) {
        prop_assume!(t <= n && l <= t as u64);
        let sys = greedy_packing_ordered(n, t, Cap::from_integer(l), PackingOrder::Shuffled(seed)).unwrap();
        prop_assert!(sys.verify().is_ok());
        prop_assert!(BigUint::from(sys.len()) >= sys.floor_guarantee());
        let back: SetSystem = sys.render().parse().unwrap();
        prop_assert_eq!(back, sys);
    }

    #[test]
    fn rank_is_transpose_invariant(q in prop::sample::select(vec![3u32, 5, 7]), rows in 1usize..6, cols in 1usize..6, seed in prop::collection::vec(0u32..1000, 36)) {
        let f = FieldSpec::new(q).unwrap();
        let data: Vec<Vec<u32>> = (0..rows).map(|r| (0..cols).map(|c| seed[r * 6 + c] % q).collect()).collect();
        let tdata: Vec<Vec<u32>> = (0..cols).map(|c| (0..rows).map(|r| data[r][c]).collect()).collect();
        let m = FqMatrix::from_rows(f, data).unwrap();
        let t = FqMatrix::from_rows(f, tdata).unwrap();
        let r = rank_gf(&m);
        prop_assert!(r <= rows.min(cols));
        prop_assert_eq!(r, rank_gf(&t));
    }
}
