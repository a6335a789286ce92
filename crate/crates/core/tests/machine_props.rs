use std::sync::Arc;

use proptest::prelude::*;
use urysohn::machine::{machine_new, read_stream_csv, replay_events, run_stream, write_stream_csv, Event};
use urysohn::metric::{bouquet_space, Point};

fn stream() -> impl Strategy<Value = Vec<(Point, usize)>> {
    proptest::collection::vec((0usize..3, 0.0f64..10.0, 0usize..3), 0..80)
        .prop_map(|v| v.into_iter().map(|(j, a, y)| (Point::on_loop(j, a), y)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replay_reproduces_every_prefix(s in stream(), tau in 0.0f64..1.0) {
        let space = Arc::new(bouquet_space(3, 10.0, 0.25).unwrap());
        let mut m = machine_new(Arc::clone(&space), tau, 3.0, 1.5, 3).unwrap();
        let trace = run_stream(&mut m, &s).unwrap();
        prop_assert_eq!(trace.sizes.len(), s.len() + 1);
        prop_assert_eq!(trace.sizes[0], 0);
        prop_assert!(trace.sizes.windows(2).all(|p| p[1] == p[0] || p[1] == p[0] + 1));
        prop_assert_eq!(replay_events(&space, &trace.events, 3), m.library().to_vec());
        let mut built = 0;
        for len in 0..=m.events().len() {
            if len > 0 && matches!(m.events()[len - 1], Event::Construct { .. }) {
                built += 1;
            }
            prop_assert_eq!(m.replay(len), m.library()[..built].to_vec());
        }
    }

    #[test]
    fn alarms_precede_every_construct(s in stream()) {
        let space = Arc::new(bouquet_space(3, 10.0, 0.25).unwrap());
        let mut m = machine_new(space, 0.0, 3.0, 1.5, 3).unwrap();
        run_stream(&mut m, &s).unwrap();
        for (i, e) in m.events().iter().enumerate() {
            if let Event::Construct { step, .. } = e {
                let prior = matches!(m.events()[i - 1], Event::Alarm { step: t, .. } if t == *step);
                prop_assert!(prior);
            }
        }
    }

    #[test]
    fn stream_csv_roundtrip(s in stream()) {
        let mut buf = Vec::new();
        write_stream_csv(&s, &mut buf).unwrap();
        prop_assert_eq!(read_stream_csv(buf.as_slice()).unwrap(), s);
    }
}

#[test]
fn residue_is_infinite_on_empty_library() {
    let space = Arc::new(bouquet_space(2, 10.0, 0.5).unwrap());
    let mut m = machine_new(space, 0.0, 4.0, 2.0, 2).unwrap();
    assert_eq!(m.alarm(&Point::on_loop(0, 1.0)), f64::INFINITY);
    m.step(&Point::on_loop(0, 5.0), 1).unwrap();
    assert_eq!(m.alarm(&Point::on_loop(0, 6.5)), 0.0);
    assert!((m.alarm(&Point::on_loop(1, 5.0)) - 8.0).abs() < 1e-12);
    assert!(matches!(m.events()[0], Event::Alarm { residue: None, .. }));
}

#[test]
fn invalid_inputs_are_rejected() {
    let space = Arc::new(bouquet_space(2, 10.0, 0.5).unwrap());
    assert!(machine_new(Arc::clone(&space), -1.0, 4.0, 2.0, 2).is_err());
    assert!(machine_new(Arc::clone(&space), 0.0, 3.0, 2.0, 2).is_err());
    let mut m = machine_new(space, 0.0, 4.0, 2.0, 2).unwrap();
    assert!(m.step(&Point::on_loop(0, 1.0), 2).is_err());
    assert!(m.step(&Point::on_loop(5, 1.0), 0).is_err());
    assert!(m.step(&Point::at(0.5), 0).is_err());
    assert!(m.events().is_empty());
}
