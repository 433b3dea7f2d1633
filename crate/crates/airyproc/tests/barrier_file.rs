use airyproc::barrier_file::{parse_barrier, to_json};
use airyproc_core::airy1::Barrier;
use proptest::prelude::*;

proptest! {
    #[test]
    fn json_round_trip(start in -5.0f64..5.0, gaps in prop::collection::vec(1e-3f64..2.0, 1..8), hs in prop::collection::vec(-10.0f64..10.0, 9)) {
        let mut t = start;
        let mut pts = vec![(t, hs[0])];
        for (g, h) in gaps.iter().zip(&hs[1..]) {
            t += g;
            pts.push((t, *h));
        }
        let b = Barrier::new(pts).unwrap();
        prop_assert_eq!(parse_barrier(&to_json(&b)).unwrap(), b);
    }

    #[test]
    fn reversed_times_are_refused(t0 in -5.0f64..5.0, dt in 1e-6f64..3.0) {
        let text = format!(r#"{{"breakpoints":[[{},0],[{},0]]}}"#, t0 + dt, t0);
        prop_assert!(parse_barrier(&text).is_err());
    }
}
