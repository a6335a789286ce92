use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use urysohn::problems::{bouquet_problem, permuted_problem, safe_region};
use urysohn::sampling::{
    coupon_stats, threshold_sweep, trial_rng, wilson, RegionLaw, SamplingDistribution, SweepGrid, Z95,
};

/// 99.9% quantile of chi-square with 7 degrees of freedom.
const CHI2_7_999: f64 = 24.322;

#[test]
fn region_frequencies_follow_the_law() {
    let p = bouquet_problem(8, 10.0, 1.0, 0.25).unwrap();
    let safe = safe_region(&p).unwrap();
    let law = RegionLaw::stress(8).unwrap();
    let dist = SamplingDistribution::new(&p, &safe, law.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 100_000;
    let mut counts = [0usize; 8];
    for (x, y) in dist.stream(draws, &mut rng) {
        counts[y] += 1;
        let id = p.space.samples().iter().position(|s| *s == x).unwrap();
        assert_eq!(safe.class_of[id], Some(y), "draw outside its region's safe list");
    }
    let chi2: f64 = counts
        .iter()
        .zip(law.weights())
        .map(|(&c, &q)| {
            let e = q * draws as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    assert!(chi2 < CHI2_7_999, "chi-square {chi2}");
}

#[test]
fn labels_follow_the_permutation() {
    let base = bouquet_problem(4, 10.0, 1.0, 0.25).unwrap();
    let p = permuted_problem(&base, &[3, 1, 0, 2]).unwrap();
    let safe = safe_region(&p).unwrap();
    let dist = SamplingDistribution::new(&p, &safe, RegionLaw::uniform(4).unwrap()).unwrap();
    let mut rng = trial_rng(1, 4, 0);
    for (x, y) in dist.stream(500, &mut rng) {
        let id = p.space.samples().iter().position(|s| *s == x).unwrap();
        assert_eq!(p.labels[safe.class_of[id].unwrap()], y);
    }
}

#[test]
fn band_is_enforced() {
    assert!(RegionLaw::new(vec![0.7, 0.1, 0.1, 0.1], 2.0, 2.0).is_err());
    assert!(RegionLaw::new(vec![0.4, 0.2, 0.2, 0.2], 2.0, 2.0).is_ok());
    assert!(RegionLaw::new(vec![0.5, 0.4], 1.0, 1.0).is_err());
}

#[test]
fn runs_are_reproducible() {
    let law = RegionLaw::stress(6).unwrap();
    assert_eq!(coupon_stats(&law, 500, 9).unwrap(), coupon_stats(&law, 500, 9).unwrap());
    assert_ne!(
        coupon_stats(&law, 500, 9).unwrap().mean,
        coupon_stats(&law, 500, 10).unwrap().mean
    );
    let grid = SweepGrid::Ratios(vec![0.5, 1.0, 1.5]);
    assert_eq!(
        threshold_sweep(&[4, 8], &grid, 300, 5, true).unwrap(),
        threshold_sweep(&[4, 8], &grid, 300, 5, true).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn success_is_monotone_in_budget(w in 2usize..12, seed in 0u64..1000) {
        let grid = SweepGrid::Counts((1..=6).map(|i| i * w).collect());
        let stats = threshold_sweep(&[w], &grid, 200, seed, false).unwrap();
        for pair in stats.rows.windows(2) {
            prop_assert!(pair[0].successes <= pair[1].successes);
            prop_assert!(pair[0].all_seen <= pair[1].all_seen);
        }
        for r in &stats.rows {
            prop_assert_eq!(r.all_seen + r.one_missed + r.multi_missed, r.trials);
            // every trial that sees all regions or misses exactly one succeeds
            prop_assert!(r.successes >= r.all_seen + r.one_missed);
            prop_assert!(r.wilson_lo <= r.rate && r.rate <= r.wilson_hi);
        }
    }

    #[test]
    fn wilson_interval_is_proper(trials in 1usize..5000, frac in 0.0f64..=1.0) {
        let s = (frac * trials as f64).round() as usize;
        let (lo, hi) = wilson(s, trials, Z95);
        prop_assert!(0.0 <= lo && lo <= hi && hi <= 1.0);
    }
}
