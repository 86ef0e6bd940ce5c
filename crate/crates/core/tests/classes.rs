mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvgkit::classes::*;
use tvgkit::graph::{SnapshotSequence, TemporalGraph};
use tvgkit::Kind;

fn report_implications(r: &ClassReport) -> Result<(), TestCaseError> {
    prop_assert!(!r.k || r.tc);
    prop_assert!(!r.tc || (r.j1a && r.ja1));
    prop_assert!(!r.k || r.e1a);
    prop_assert!(!r.e1a || (r.j1a && r.ja1));
    prop_assert!(!r.tcrt || r.tc);
    prop_assert!(!r.strict.tcrt || r.strict.tc);
    prop_assert!(!r.strict.tc || (r.strict.j1a && r.strict.ja1));
    prop_assert!(!r.strict.j1a || r.j1a);
    prop_assert!(!r.strict.ja1 || r.ja1);
    prop_assert!(!r.strict.tc || r.tc);
    prop_assert!(!r.strict.tcrt || r.tcrt);
    if let Some(p) = r.period {
        prop_assert!(r.delta.is_some_and(|d| d <= p));
    }
    Ok(())
}

fn names_of(s: &SnapshotSequence, set: &[usize]) -> Vec<String> {
    set.iter().map(|&i| s.nodes.name(i).to_string()).collect()
}

fn random_set(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hierarchy_implications_hold(s in arb_sequence(6, 6)) {
        report_implications(&classify(&s.into()))?;
    }

    #[test]
    fn covering_relations(s in arb_sequence(6, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = s.n();
        let fixed = random_set(&mut rng, n);
        let per: Vec<Vec<usize>> = (0..s.len()).map(|_| random_set(&mut rng, n)).collect();
        let fixed_sol = CoverSolution::Fixed(names_of(&s, &fixed));
        let evolving = CoverSolution::PerSnapshot(per.iter().map(|x| names_of(&s, x)).collect());
        let permanent = verify_covering(&s, CoverVersion::Permanent, &fixed_sol).unwrap();
        let replay = CoverSolution::PerSnapshot(vec![names_of(&s, &fixed); s.len()]);
        if permanent {
            prop_assert!(verify_covering(&s, CoverVersion::Evolving, &replay).unwrap());
        }
        if verify_covering(&s, CoverVersion::Evolving, &evolving).unwrap() {
            let mut union: Vec<usize> = per.concat();
            union.sort();
            union.dedup();
            let u = CoverSolution::Fixed(names_of(&s, &union));
            prop_assert!(verify_covering(&s, CoverVersion::Temporal, &u).unwrap());
        }
        if dominates(&s.intersection_graph(), &fixed) {
            prop_assert!(permanent);
        }
    }

    #[test]
    fn trees_make_every_mis_robust(seed in any::<u64>(), n in 2..=9usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = tvgkit::generate::random_connected_graph(&mut rng, n, 0.0);
        for s in maximal_independent_sets(&g).unwrap() {
            let names: Vec<String> = s.iter().map(|&i| g.nodes.name(i).to_string()).collect();
            prop_assert!(is_robust_mis(&g, &names).unwrap());
        }
    }
}

#[test]
fn robust_check_matches_enumeration_up_to_six() {
    for n in 1..=6 {
        for g in connected_graphs_up_to_iso(n) {
            let sets = maximal_independent_sets(&g).unwrap();
            let masks: Vec<u32> = sets.iter().map(|s| s.iter().map(|&i| 1u32 << i).sum()).collect();
            let oracle = robust_by_enumeration(&g, &masks);
            for (s, want) in sets.iter().zip(oracle) {
                let names: Vec<String> = s.iter().map(|&i| g.nodes.name(i).to_string()).collect();
                assert_eq!(is_robust_mis(&g, &names).unwrap(), want, "{:?} {:?}", g.edges, s);
            }
        }
    }
}

#[test]
fn iso_classes_are_counted_correctly() {
    let counts: Vec<usize> = (1..=6).map(|n| connected_graphs_up_to_iso(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
}

#[test]
fn journey_figure_report() {
    let r = classify(&journey_fig().into());
    assert!(r.j1a);
    assert_eq!(r.witness.j1a.as_deref(), Some("a"));
    assert!(!r.tc);
    assert_eq!(r.tdiam, None);
    let m = finite_class_membership(&journey_fig().into(), FiniteClass::J1A, Kind::Strict);
    assert_eq!(m.witness.as_deref(), Some("a"));
    let json = serde_json::to_value(&r).unwrap();
    for key in ["J1A", "JA1", "TC", "TCrt", "E1A", "K", "delta", "period", "tinterval", "tdiam", "rtdiam", "alpha"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn periodic_and_constant_reports() {
    let two = seq(&["a", "b", "c"], &[&[("a", "b")], &[("b", "c")], &[("a", "b")], &[("b", "c")]]);
    assert_eq!(classify(&two.into()).period, Some(2));
    let path: &[(&str, &str)] = &[("a", "b"), ("b", "c")];
    let c = seq(&["a", "b", "c"], &[path, path, path, path, path]);
    let r = classify(&c.into());
    assert_eq!((r.delta, r.tinterval), (Some(1), Some(5)));
    assert!(r.j1a && r.ja1 && r.tc && r.tcrt && r.e1a);
    assert!(!r.k);
}

#[test]
fn triangle_period_on_characteristic_dates() {
    let g: TemporalGraph = triangle(3);
    let s = g.to_snapshots();
    let p = smallest_period(&s).unwrap();
    let one = triangle(1).to_snapshots().len();
    assert_eq!(p, one);
}

#[test]
fn robust_mis_figures() {
    let tri = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]);
    assert_eq!(find_robust_mis(&tri).unwrap(), None);
    let bull = graph(&["a", "b", "c", "d", "e"], &[("a", "b"), ("b", "c"), ("c", "e"), ("b", "d"), ("d", "c")]);
    assert!(is_robust_mis(&bull, &names(&["a", "d", "e"])).unwrap());
    assert!(!is_robust_mis(&bull, &names(&["a", "c"])).unwrap());
    let sq = graph(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
    for s in maximal_independent_sets(&sq).unwrap() {
        let nm: Vec<String> = s.iter().map(|&i| sq.nodes.name(i).to_string()).collect();
        assert!(is_robust_mis(&sq, &nm).unwrap());
    }
    let big = tvgkit::generate::moon_moser(7);
    assert!(matches!(find_robust_mis(&big), Err(tvgkit::Error::Limit { .. })));
}
