use std::sync::Arc;

use proptest::prelude::*;
use urysohn::coverings::{separation_certificate, verify_covering, width_bracket};
use urysohn::metric::{bouquet_space, Point};
use urysohn::problems::{
    bouquet_problem, custom_problem, permuted_problem, safe_region, union_problem, validate_margin, Region,
};

fn three_balls(gamma: f64) -> urysohn::problems::MarginProblem {
    let space = Arc::new(bouquet_space(3, 12.0, 0.25).unwrap());
    let regions = (0..3)
        .map(|j| Region::Ball {
            center: Point::on_loop(j, 6.0),
            radius: 0.5,
        })
        .collect();
    custom_problem(space, regions, gamma).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn safe_region_grows_with_gamma(a in 0.05f64..10.9, b in 0.05f64..10.9) {
        let (lo, hi) = (a.min(b), a.max(b));
        let small = safe_region(&three_balls(lo)).unwrap();
        let big = safe_region(&three_balls(hi)).unwrap();
        for (s, l) in small.per_class.iter().zip(&big.per_class) {
            prop_assert!(s.iter().all(|id| l.contains(id)));
        }
    }

    #[test]
    fn margin_report_ignores_labels(w in 1usize..5, shift in 0usize..4) {
        let p = bouquet_problem(w, 10.0, 1.0, 0.5).unwrap();
        let sigma: Vec<usize> = (0..w).map(|j| (j + shift) % w).collect();
        let q = permuted_problem(&p, &sigma).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&validate_margin(&p)).unwrap(),
            serde_json::to_string(&validate_margin(&q)).unwrap()
        );
        prop_assert_eq!(
            serde_json::to_string(&separation_certificate(&p, 4.0).unwrap()).unwrap(),
            serde_json::to_string(&separation_certificate(&q, 4.0).unwrap()).unwrap()
        );
        let (bp, bq) = (width_bracket(&p, 4.0).unwrap(), width_bracket(&q, 4.0).unwrap());
        prop_assert_eq!((bp.lb, bp.ub), (bq.lb, bq.ub));
        prop_assert!(verify_covering(&q, &bq.upper.covering).pass);
    }

    #[test]
    fn bracket_is_ordered_and_certified(
        w in 1usize..4,
        length in 8.0f64..14.0,
        gamma_frac in 0.05f64..=0.1,
        d0_frac in 0.05f64..0.9,
    ) {
        let gamma = gamma_frac * length;
        let p = bouquet_problem(w, length, gamma, gamma / 4.0).unwrap();
        let b = width_bracket(&p, d0_frac * length).unwrap();
        prop_assert!(b.lb <= b.ub);
        prop_assert_eq!(b.exact, b.lb == b.ub);
        prop_assert!(verify_covering(&p, &b.upper.covering).pass);
        prop_assert_eq!(b.upper.covering.len(), b.ub);
    }

    #[test]
    fn brackets_add_over_unions(a in 1usize..4, b in 1usize..4, d0 in 2.0f64..4.5) {
        let pa = bouquet_problem(a, 10.0, 1.0, 0.5).unwrap();
        let pb = bouquet_problem(b, 10.0, 1.0, 0.5).unwrap();
        let u = union_problem(&pa, &pb, 50.0).unwrap();
        let (ba, bb, bu) = (
            width_bracket(&pa, d0).unwrap(),
            width_bracket(&pb, d0).unwrap(),
            width_bracket(&u, d0).unwrap(),
        );
        prop_assert_eq!(bu.lb, ba.lb + bb.lb);
        prop_assert_eq!(bu.ub, ba.ub + bb.ub);
    }
}

#[test]
fn spec_roundtrip_rebuilds_the_same_problem() {
    let p = bouquet_problem(3, 10.0, 1.0, 0.4).unwrap();
    let q = permuted_problem(&p, &[2, 0, 1]).unwrap();
    let json = serde_json::to_string(&q.spec).unwrap();
    let rebuilt = serde_json::from_str::<urysohn::ProblemSpec>(&json)
        .unwrap()
        .build()
        .unwrap();
    assert_eq!(rebuilt.labels, q.labels);
    assert_eq!(rebuilt.space.samples(), q.space.samples());
    assert_eq!(
        serde_json::to_string(&validate_margin(&rebuilt)).unwrap(),
        serde_json::to_string(&validate_margin(&q)).unwrap()
    );
}
