mod common;

use common::*;
use proptest::prelude::*;
use tvgkit::graph::TemporalGraph;
use tvgkit::journey::temporal_diameter_at;
use tvgkit::windows::*;
use tvgkit::{Kind, Time};

fn finite_le(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Duration(_), Value::Duration(None)) => true,
        (Value::Duration(Some(x)), Value::Duration(Some(y))) => x <= y,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn full_width_is_the_global_metric(s in arb_sequence(5, 6)) {
        let g: TemporalGraph = s.clone().into();
        let d = Time::int(s.len() as i64);
        let series = sliding_metric(&g, &Metric::TDiam, d, Time::ONE, Kind::Strict).unwrap();
        prop_assert_eq!(series.points.len(), 1);
        let global = temporal_diameter_at(&g, Time::int(-1), Kind::Strict);
        prop_assert_eq!(&series.points[0].1, &Value::Duration(global));
        let tc = sliding_metric(&g, &Metric::TcFlag, d, Time::int(3), Kind::Strict).unwrap();
        let full = tvgkit::closure::strict_closure(&s).is_complete();
        prop_assert_eq!(&tc.points[0].1, &Value::Flag(full));
    }

    #[test]
    fn tdiam_is_antitone_in_width(s in arb_sequence(5, 8)) {
        let g: TemporalGraph = s.clone().into();
        let d = s.len() as i64;
        for w in 1..d {
            let small = sliding_metric(&g, &Metric::TDiam, Time::int(w), Time::ONE, Kind::Strict).unwrap();
            let large = sliding_metric(&g, &Metric::TDiam, Time::int(w + 1), Time::ONE, Kind::Strict).unwrap();
            for ((a, vl), (b, vs)) in large.points.iter().zip(&small.points) {
                prop_assert_eq!(a, b);
                prop_assert!(finite_le(vl, vs));
            }
        }
    }
}

#[test]
fn periodic_trace_gives_periodic_series() {
    let g: TemporalGraph = weekly_line(6).into();
    let s = sliding_metric(&g, &Metric::Ecc("a".into()), Time::int(14), Time::ONE, Kind::Strict).unwrap();
    let v: Vec<&Value> = s.points.iter().map(|p| &p.1).collect();
    for i in 0..v.len() - 7 {
        assert_eq!(v[i], v[i + 7]);
    }
}

#[test]
fn overlap_full_window_not_connected() {
    let g: TemporalGraph = overlap_fig().into();
    let s = sliding_metric(&g, &Metric::TcFlag, Time::int(4), Time::ONE, Kind::Strict).unwrap();
    assert_eq!(s.points, vec![(Time::ZERO, Value::Flag(false))]);
}

#[test]
fn continuous_windows() {
    let g = triangle(2);
    let s = sliding_metric(&g, &Metric::Ecc("a".into()), Time::int(100), Time::int(50), Kind::Strict).unwrap();
    assert_eq!(s.points.len(), 3);
    assert_eq!(s.points[0], (Time::ZERO, Value::Duration(Some(Time::int(11)))));
    assert_eq!(s.points[0].1, s.points[2].1);
    let csv = s.to_csv();
    assert!(csv.starts_with("start,value\n0,11\n"));
}
