#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use tvgkit::graph::{edge, EdgeSet, IntervalGraph, SnapshotSequence, StaticGraph, TemporalGraph};
use tvgkit::time::t;
use tvgkit::{Kind, NodeList, Time};

pub type TimedHop = (usize, usize, i64);

pub fn seq(nodes: &[&str], snaps: &[&[(&str, &str)]]) -> SnapshotSequence {
    SnapshotSequence::from_names(nodes, snaps).unwrap()
}

/// Builds a snapshot sequence from timed edge occurrences.
pub fn timed(nodes: &[&str], len: usize, hops: &[(&str, &str, usize)]) -> SnapshotSequence {
    let mut snaps: Vec<Vec<(&str, &str)>> = vec![Vec::new(); len];
    for &(u, v, time) in hops {
        snaps[time].push((u, v));
    }
    let refs: Vec<&[(&str, &str)]> = snaps.iter().map(|s| s.as_slice()).collect();
    seq(nodes, &refs)
}

pub fn journey_fig() -> SnapshotSequence {
    seq(
        &["a", "b", "c", "d", "e"],
        &[
            &[("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")],
            &[("a", "b"), ("b", "c"), ("c", "d")],
            &[("a", "b"), ("c", "d"), ("c", "e"), ("d", "e")],
            &[("c", "e"), ("d", "e")],
        ],
    )
}

pub fn closure_fig() -> SnapshotSequence {
    timed(
        &["a", "b", "c", "d", "e"],
        5,
        &[
            ("a", "b", 1),
            ("a", "c", 1),
            ("b", "c", 2),
            ("b", "d", 2),
            ("c", "d", 2),
            ("c", "d", 3),
            ("c", "e", 3),
            ("c", "e", 4),
            ("d", "e", 3),
            ("d", "e", 4),
        ],
    )
}

pub fn overlap_fig() -> SnapshotSequence {
    timed(&["a", "b", "c", "d"], 4, &[("a", "b", 2), ("b", "c", 1), ("b", "c", 3), ("c", "d", 2)])
}

pub fn line_fig() -> SnapshotSequence {
    timed(
        &["a", "b", "c", "d"],
        7,
        &[("a", "b", 1), ("a", "b", 3), ("b", "c", 2), ("b", "c", 5), ("c", "d", 6)],
    )
}

pub fn menger_fig() -> SnapshotSequence {
    timed(
        &["s", "t", "v1", "v2", "v3"],
        8,
        &[
            ("s", "v1", 5),
            ("s", "v2", 1),
            ("v1", "t", 3),
            ("v1", "v2", 2),
            ("v1", "v3", 6),
            ("v2", "v3", 4),
            ("v3", "t", 7),
        ],
    )
}

/// Six stops served one link per weekday (Monday to Friday), `weeks` weeks.
pub fn weekly_line(weeks: usize) -> SnapshotSequence {
    let names = ["a", "b", "c", "d", "e", "f"];
    let mut hops = Vec::new();
    for w in 0..weeks {
        for day in 1..=5 {
            hops.push((names[day - 1], names[day], 7 * w + day));
        }
    }
    timed(&names, 7 * weeks, &hops)
}

pub fn distance_fig() -> TemporalGraph {
    let iv = |a: &str, b: &str| (t(a), t(b));
    IntervalGraph::from_names(
        &["a", "b", "c", "d", "e", "f", "g"],
        &[
            ("a", "b", &[iv("1", "2")]),
            ("b", "c", &[iv("3", "4")]),
            ("c", "d", &[iv("5", "6")]),
            ("a", "e", &[iv("4", "5")]),
            ("e", "d", &[iv("9", "10")]),
            ("a", "f", &[iv("6", "8")]),
            ("f", "g", &[iv("6", "8")]),
            ("g", "d", &[iv("6", "8")]),
        ],
        t("0.01"),
    )
    .unwrap()
    .with_lifetime(tvgkit::Interval::new(Time::ZERO, Time::int(10)))
    .into()
}

/// The periodic triangle unrolled over `periods` periods of length 100.
pub fn triangle(periods: i64) -> TemporalGraph {
    let mut ab = Vec::new();
    let mut ac = Vec::new();
    let mut bc = Vec::new();
    for k in 0..periods {
        let o = 100 * k;
        let iv = |a: i64, b: i64| (Time::int(o + a), Time::int(o + b));
        ab.push(iv(0, 30));
        ac.push(iv(20, 60));
        bc.push(iv(10, 40));
        bc.push(iv(70, 80));
    }
    IntervalGraph::from_names(
        &["a", "b", "c"],
        &[("a", "b", &ab), ("a", "c", &ac), ("b", "c", &bc)],
        Time::ONE,
    )
    .unwrap()
    .with_lifetime(tvgkit::Interval::new(Time::ZERO, Time::int(100 * periods)))
    .into()
}

pub fn graph(nodes: &[&str], edges: &[(&str, &str)]) -> StaticGraph {
    StaticGraph::from_names(nodes, edges).unwrap()
}

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn name_set(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Every simple journey (no repeated node) in a discrete trace, by absolute
/// hop time.
pub fn simple_journeys(s: &SnapshotSequence, kind: Kind) -> Vec<Vec<TimedHop>> {
    fn grow(s: &SnapshotSequence, kind: Kind, path: &mut Vec<TimedHop>, visited: &mut Vec<bool>, out: &mut Vec<Vec<TimedHop>>) {
        let &(_, at, last) = path.last().expect("non-empty");
        let first = match kind {
            Kind::Strict => last + 1,
            Kind::NonStrict => last,
        };
        for i in 0..s.len() {
            let time = s.time_of(i);
            if time < first {
                continue;
            }
            for &(a, b) in &s.snapshots[i] {
                for (x, y) in [(a, b), (b, a)] {
                    if x == at && !visited[y] {
                        path.push((x, y, time));
                        visited[y] = true;
                        out.push(path.clone());
                        grow(s, kind, path, visited, out);
                        visited[y] = false;
                        path.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..s.len() {
        let time = s.time_of(i);
        for &(a, b) in &s.snapshots[i] {
            for (x, y) in [(a, b), (b, a)] {
                let mut visited = vec![false; s.n()];
                visited[x] = true;
                visited[y] = true;
                let mut path = vec![(x, y, time)];
                out.push(path.clone());
                grow(s, kind, &mut path, &mut visited, &mut out);
            }
        }
    }
    out
}

/// Strict walks (nodes may repeat) from `src` whose hops lie in `[lo, hi)`.
pub fn strict_walks(s: &SnapshotSequence, src: usize, lo: i64, hi: i64) -> Vec<Vec<TimedHop>> {
    fn grow(s: &SnapshotSequence, hi: i64, path: &mut Vec<TimedHop>, out: &mut Vec<Vec<TimedHop>>) {
        let &(_, at, last) = path.last().expect("non-empty");
        for time in last + 1..hi {
            let Some(i) = s.index_of(time) else { continue };
            for &(a, b) in &s.snapshots[i] {
                for (x, y) in [(a, b), (b, a)] {
                    if x == at {
                        path.push((x, y, time));
                        out.push(path.clone());
                        grow(s, hi, path, out);
                        path.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for time in lo..hi {
        let Some(i) = s.index_of(time) else { continue };
        for &(a, b) in &s.snapshots[i] {
            for (x, y) in [(a, b), (b, a)] {
                if x == src {
                    let mut path = vec![(x, y, time)];
                    out.push(path.clone());
                    grow(s, hi, &mut path, &mut out);
                }
            }
        }
    }
    out
}

pub fn reach_oracle(s: &SnapshotSequence, kind: Kind) -> BTreeSet<(usize, usize)> {
    simple_journeys(s, kind)
        .iter()
        .map(|j| (j[0].0, j.last().unwrap().1))
        .collect()
}

/// One connected graph per isomorphism class for `n ≤ 7`, by canonical
/// form under all vertex permutations.
pub fn connected_graphs_up_to_iso(n: usize) -> Vec<StaticGraph> {
    let perms = permutations(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let index = |u: usize, v: usize| {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    let images: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| index(p[u], p[v])).collect())
        .collect();
    let canon = |mask: u32| -> u32 {
        images
            .iter()
            .map(|img| {
                let mut m = 0u32;
                for (i, &j) in img.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        m |= 1 << j;
                    }
                }
                m
            })
            .min()
            .unwrap()
    };
    // grow canonical graphs edge by edge from the empty graph
    let mut levels: BTreeSet<u32> = BTreeSet::from([0]);
    let mut all: BTreeSet<u32> = levels.clone();
    for _ in 0..pairs.len() {
        let mut next = BTreeSet::new();
        for &m in &levels {
            for i in 0..pairs.len() {
                if m >> i & 1 == 0 {
                    next.insert(canon(m | 1 << i));
                }
            }
        }
        all.extend(next.iter().copied());
        levels = next;
    }
    let nodes: NodeList = tvgkit::generate::node_names(n);
    all.into_iter()
        .map(|m| {
            let edges: EdgeSet = (0..pairs.len())
                .filter(|i| m >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            StaticGraph::new(nodes.clone(), edges).unwrap()
        })
        .filter(|g| g.is_connected())
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// For each candidate set (as a bitmask), whether it stays a maximal
/// independent set in every connected spanning subgraph of `g`.
pub fn robust_by_enumeration(g: &StaticGraph, candidates: &[u32]) -> Vec<bool> {
    let edges: Vec<(usize, usize)> = g.edges.iter().copied().collect();
    let n = g.n();
    let full = (1u32 << n) - 1;
    let mut ok = vec![true; candidates.len()];
    let mut adj = vec![0u32; n];
    for mask in 0u64..(1u64 << edges.len()) {
        adj.iter_mut().for_each(|a| *a = 0);
        for (i, &(u, v)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        if seen != full {
            continue;
        }
        for (k, &s) in candidates.iter().enumerate() {
            if !ok[k] {
                continue;
            }
            let mis = (0..n).all(|v| {
                if s >> v & 1 == 1 {
                    adj[v] & s == 0
                } else {
                    adj[v] & s != 0
                }
            });
            if !mis {
                ok[k] = false;
            }
        }
    }
    ok
}

pub const LETTERS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn build(n: usize, raw: Vec<Vec<(usize, usize)>>) -> SnapshotSequence {
    let nodes = NodeList::new(LETTERS[..n].iter().copied()).unwrap();
    let snaps = raw
        .into_iter()
        .map(|s| s.into_iter().filter(|(u, v)| u != v).map(|(u, v)| edge(u, v)).collect())
        .collect();
    SnapshotSequence::new(nodes, snaps).unwrap()
}

/// Random discrete traces with `2..=max_n` nodes and `1..=max_delta`
/// snapshots.
pub fn arb_sequence(max_n: usize, max_delta: usize) -> impl Strategy<Value = SnapshotSequence> {
    (2..=max_n).prop_flat_map(move |n| {
        let snap = prop::collection::vec((0..n, 0..n), 0..=n + 1);
        prop::collection::vec(snap, 1..=max_delta).prop_map(move |raw| build(n, raw))
    })
}

/// Random interval graphs on up to five nodes with integer endpoints in
/// `[0, 20]` and latency 0, 1/2 or 1.
pub fn arb_interval_graph() -> impl Strategy<Value = IntervalGraph> {
    (2..=5usize, 0..3i64).prop_flat_map(|(n, z)| {
        let iv = (0..20i64, 1..8i64);
        let edge_ivs = ((0..n, 0..n), prop::collection::vec(iv, 1..=2));
        prop::collection::vec(edge_ivs, 1..=2 * n).prop_map(move |raw| {
            let nodes = NodeList::new(LETTERS[..n].iter().copied()).unwrap();
            let mut map: BTreeMap<(usize, usize), Vec<tvgkit::Interval>> = BTreeMap::new();
            for ((u, v), ivs) in raw {
                if u == v {
                    continue;
                }
                for (a, len) in ivs {
                    map.entry(edge(u, v))
                        .or_default()
                        .push(tvgkit::Interval::new(Time::int(a), Time::int(a + len)));
                }
            }
            IntervalGraph::new(nodes, map, Time::new(z, 2)).unwrap()
        })
    })
}
