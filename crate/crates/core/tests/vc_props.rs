use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use urysohn::vc::{intervals_class, patchwise_class, vc_dimension, HypothesisTable};

/// Largest shattered subset by checking every subset of the ground set.
fn naive_vc(ground: usize, masks: &[u32]) -> usize {
    let mut best = 0;
    for subset in 0u32..1 << ground {
        let size = subset.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut patterns: Vec<u32> = masks.iter().map(|m| m & subset).collect();
        patterns.sort_unstable();
        patterns.dedup();
        if patterns.len() == 1 << size {
            best = size;
        }
    }
    best
}

#[test]
fn search_matches_naive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let ground = rng.random_range(1..=10);
        let count = rng.random_range(1..=1usize << ground.min(7));
        let masks: Vec<u32> = (0..count).map(|_| rng.random_range(0..1u32 << ground)).collect();
        let t = HypothesisTable::binary(ground, masks.iter().copied()).unwrap();
        assert_eq!(vc_dimension(&t).unwrap(), naive_vc(ground, &masks), "masks {masks:?}");
    }
}

#[test]
fn interval_unions_match_oracle() {
    for (n, grid) in [(1, 8), (2, 12)] {
        let t = intervals_class(n, grid).unwrap();
        let HypothesisTable::Binary { masks, .. } = &t else {
            unreachable!()
        };
        assert_eq!(vc_dimension(&t).unwrap(), 2 * n);
        assert_eq!(naive_vc(grid, masks), 2 * n);
    }
}

#[test]
fn patchwise_counts() {
    let p = patchwise_class(3).unwrap();
    assert_eq!(p.table.as_ref().unwrap().len(), 27);
    assert_eq!(vc_dimension(p.one_vs_rest.as_ref().unwrap()).unwrap(), 3);
    assert!(vc_dimension(p.table.as_ref().unwrap()).is_err());
}

proptest! {
    #[test]
    fn vc_is_monotone_and_log_bounded(
        ground in 1usize..9,
        base in proptest::collection::vec(any::<u32>(), 1..40),
        extra in proptest::collection::vec(any::<u32>(), 0..20),
    ) {
        let clip = |m: &u32| m & ((1u32 << ground) - 1);
        let small = HypothesisTable::binary(ground, base.iter().map(clip)).unwrap();
        let big = HypothesisTable::binary(ground, base.iter().chain(&extra).map(clip)).unwrap();
        let (a, b) = (vc_dimension(&small).unwrap(), vc_dimension(&big).unwrap());
        prop_assert!(a <= b);
        prop_assert!((1usize << b) <= big.len());
    }

    #[test]
    fn csv_roundtrip(ground in 1usize..12, masks in proptest::collection::vec(any::<u32>(), 0..30)) {
        let t = HypothesisTable::binary(ground, masks.iter().map(|m| m & ((1u32 << ground) - 1))).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        prop_assert_eq!(HypothesisTable::read_csv(buf.as_slice()).unwrap(), t);
    }
}
