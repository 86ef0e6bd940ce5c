//! Transitive closures of journeys, round-trip closures, closed temporal
//! components and the semaphore gadget.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{check_limit, Error, Result};
use crate::graph::{components, edge, EdgeSet, NodeList, SnapshotSequence, StaticGraph, TemporalGraph};
use crate::journey::{earliest_arrival, Kind};

/// Reachability relation `u ⇝ v` over nodes; loops are implied, not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub nodes: NodeList,
    succ: Vec<FixedBitSet>,
}

impl Closure {
    fn from_predecessors(nodes: NodeList, pred: Vec<FixedBitSet>) -> Closure {
        let n = nodes.len();
        let mut succ = vec![FixedBitSet::with_capacity(n); n];
        for (v, p) in pred.iter().enumerate() {
            for u in p.ones() {
                if u != v {
                    succ[u].insert(v);
                }
            }
        }
        Closure { nodes, succ }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        u == v || self.succ[u].contains(v)
    }

    pub fn contains_names(&self, u: &str, v: &str) -> bool {
        match (self.nodes.index(u), self.nodes.index(v)) {
            (Some(a), Some(b)) => self.contains(a, b),
            _ => false,
        }
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[u].ones()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|u| self.succ[u].ones().map(move |v| (u, v)))
            .collect()
    }

    pub fn arc_names(&self) -> BTreeSet<(String, String)> {
        self.arcs()
            .into_iter()
            .map(|(u, v)| (self.nodes.name(u).to_string(), self.nodes.name(v).to_string()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.succ.iter().map(|s| s.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.len() == n * n.saturating_sub(1)
    }

    /// Nodes reaching every other node.
    pub fn out_dominators(&self) -> Vec<usize> {
        let n = self.n();
        (0..n)
            .filter(|&u| self.succ[u].count_ones(..) == n - 1)
            .collect()
    }

    /// Nodes reached by every other node.
    pub fn in_dominators(&self) -> Vec<usize> {
        let n = self.n();
        (0..n)
            .filter(|&v| (0..n).all(|u| self.contains(u, v)))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph closure {\n");
        for i in 0..self.n() {
            let _ = writeln!(out, "  \"{}\";", self.nodes.name(i));
        }
        // mutual arcs are drawn once as a two-headed edge
        for (u, v) in self.arcs() {
            let (a, b) = (self.nodes.name(u), self.nodes.name(v));
            if !self.contains(v, u) {
                let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
            } else if u < v {
                let _ = writeln!(out, "  \"{a}\" -> \"{b}\" [dir=both];");
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let arcs: Vec<(&str, &str)> = self
            .arcs()
            .into_iter()
            .map(|(u, v)| (self.nodes.name(u), self.nodes.name(v)))
            .collect();
        serde_json::json!({ "nodes": self.nodes.names(), "arcs": arcs })
    }
}

/// Scan over snapshots, each edge merging the predecessor sets frozen at the
/// end of the previous snapshot. O(kμn) bit operations.
fn scan<'a>(n: usize, snapshots: impl Iterator<Item = &'a EdgeSet>) -> Vec<FixedBitSet> {
    let mut pred = vec![FixedBitSet::with_capacity(n); n];
    for snap in snapshots {
        if snap.is_empty() {
            continue;
        }
        let frozen = pred.clone();
        for &(u, v) in snap {
            pred[v].union_with(&frozen[u]);
            pred[v].insert(u);
            pred[u].union_with(&frozen[v]);
            pred[u].insert(v);
        }
    }
    pred
}

/// Replaces a snapshot by the union of cliques over its connected components.
pub fn component_cliques(n: usize, snap: &EdgeSet) -> EdgeSet {
    let mut out = EdgeSet::new();
    for comp in components(n, snap) {
        for (i, &u) in comp.iter().enumerate() {
            for &v in &comp[i + 1..] {
                out.insert((u, v));
            }
        }
    }
    out
}

pub fn strict_closure(s: &SnapshotSequence) -> Closure {
    Closure::from_predecessors(s.nodes.clone(), scan(s.n(), s.snapshots.iter()))
}

pub fn nonstrict_closure(s: &SnapshotSequence) -> Closure {
    let cliques: Vec<EdgeSet> = s.snapshots.iter().map(|e| component_cliques(s.n(), e)).collect();
    Closure::from_predecessors(s.nodes.clone(), scan(s.n(), cliques.iter()))
}

pub fn closure(s: &SnapshotSequence, kind: Kind) -> Closure {
    match kind {
        Kind::Strict => strict_closure(s),
        Kind::NonStrict => nonstrict_closure(s),
    }
}

/// Closure of any temporal graph. Interval graphs are handled by foremost
/// searches from the lifetime start, which respects latency.
pub fn closure_of(g: &TemporalGraph, kind: Kind) -> Closure {
    match g {
        TemporalGraph::Snapshots(s) => closure(s, kind),
        TemporalGraph::Intervals(_) => {
            let n = g.n();
            let start = g.lifetime().map(|l| l.start).unwrap_or_default();
            let mut pred = vec![FixedBitSet::with_capacity(n); n];
            for u in 0..n {
                let rt = earliest_arrival(g, g.nodes().name(u), start, kind)
                    .expect("start inside lifetime");
                for v in rt.reached() {
                    pred[v].insert(u);
                }
            }
            Closure::from_predecessors(g.nodes().clone(), pred)
        }
    }
}

/// Closure labelled with earliest arrival and latest departure inside a
/// discrete window `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTripClosure {
    pub nodes: NodeList,
    pub start: i64,
    pub end: i64,
    /// `labels[u * n + v] = Some((ea, ld))` when `u ⇝ v` inside the window.
    labels: Vec<Option<(i64, i64)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTripArc {
    pub u: String,
    pub v: String,
    pub ea: i64,
    pub ld: i64,
}

impl RoundTripClosure {
    pub fn empty(nodes: NodeList, start: i64, end: i64) -> RoundTripClosure {
        let n = nodes.len();
        RoundTripClosure {
            nodes,
            start,
            end,
            labels: vec![None; n * n],
        }
    }

    /// Closure of the single snapshot at absolute time `t`.
    pub fn lift(nodes: &NodeList, snap: &EdgeSet, t: i64, kind: Kind) -> RoundTripClosure {
        let n = nodes.len();
        let mut rc = RoundTripClosure::empty(nodes.clone(), t, t + 1);
        let edges = match kind {
            Kind::Strict => snap.clone(),
            Kind::NonStrict => component_cliques(n, snap),
        };
        for (u, v) in edges {
            rc.labels[u * n + v] = Some((t, t));
            rc.labels[v * n + u] = Some((t, t));
        }
        rc
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn get(&self, u: usize, v: usize) -> Option<(i64, i64)> {
        if u == v {
            return None;
        }
        self.labels[u * self.n() + v]
    }

    pub fn ea(&self, u: usize, v: usize) -> Option<i64> {
        self.get(u, v).map(|x| x.0)
    }

    pub fn ld(&self, u: usize, v: usize) -> Option<i64> {
        self.get(u, v).map(|x| x.1)
    }

    pub fn arcs(&self) -> Vec<RoundTripArc> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if let Some((ea, ld)) = self.get(u, v) {
                    out.push(RoundTripArc {
                        u: self.nodes.name(u).to_string(),
                        v: self.nodes.name(v).to_string(),
                        ea,
                        ld,
                    });
                }
            }
        }
        out
    }

    /// Every ordered pair can go and come back: `ea(u,v) < ld(v,u)` for
    /// strict journeys, `≤` for non-strict ones.
    pub fn round_trip_complete(&self, kind: Kind) -> bool {
        let n = self.n();
        (0..n).all(|u| {
            (0..n).filter(|&v| v != u).all(|v| match (self.ea(u, v), self.ld(v, u)) {
                (Some(ea), Some(ld)) => match kind {
                    Kind::Strict => ea < ld,
                    Kind::NonStrict => ea <= ld,
                },
                _ => false,
            })
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.names(),
            "window": [self.start, self.end],
            "arcs": self.arcs(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph roundtrip {\n");
        for a in self.arcs() {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [ea={}, ld={}];", a.u, a.v, a.ea, a.ld);
        }
        out.push_str("}\n");
        out
    }
}

/// Composition of closures over adjacent windows.
pub fn concat_roundtrip(a: &RoundTripClosure, b: &RoundTripClosure) -> Result<RoundTripClosure> {
    if a.end != b.start {
        return Err(Error::contract(format!(
            "windows [{},{}) and [{},{}) are not adjacent",
            a.start, a.end, b.start, b.end
        )));
    }
    if a.nodes != b.nodes {
        return Err(Error::contract("closures over different node sets"));
    }
    let n = a.n();
    let mut out = RoundTripClosure::empty(a.nodes.clone(), a.start, b.end);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            // a journey finishing in A arrives before any B journey
            let ea = a.ea(u, v).or_else(|| {
                let via = (0..n)
                    .filter(|&w| w != v && (w == u || a.get(u, w).is_some()))
                    .filter_map(|w| b.ea(w, v));
                via.min()
            });
            let ld = b.ld(u, v).or_else(|| {
                let via = (0..n)
                    .filter(|&w| w != u && (w == v || b.get(w, v).is_some()))
                    .filter_map(|w| a.ld(u, w));
                via.max()
            });
            match (ea, ld) {
                (Some(ea), Some(ld)) => out.labels[u * n + v] = Some((ea, ld)),
                (None, None) => {}
                _ => unreachable!("arrival and departure labels appear together"),
            }
        }
    }
    Ok(out)
}

/// Round-trip closure over an absolute window, folded from single-snapshot
/// closures.
pub fn roundtrip_closure(s: &SnapshotSequence, window: Option<(i64, i64)>, kind: Kind) -> Result<RoundTripClosure> {
    let (lo, hi) = s.lifetime();
    let (a, b) = window.unwrap_or((lo, hi));
    if a >= b || a < lo || b > hi {
        return Err(Error::range(format!(
            "window [{a},{b}) is not inside the lifetime [{lo},{hi})"
        )));
    }
    let mut acc = RoundTripClosure::empty(s.nodes.clone(), a, a);
    for t in a..b {
        let i = s.index_of(t).expect("inside lifetime");
        let step = RoundTripClosure::lift(&s.nodes, &s.snapshots[i], t, kind);
        acc = concat_roundtrip(&acc, &step)?;
    }
    Ok(acc)
}

pub const COMPONENT_LIMIT: usize = 15;

/// Sub-sequence induced by a node subset (nodes outside are isolated).
fn induced(s: &SnapshotSequence, keep: &FixedBitSet) -> Vec<EdgeSet> {
    s.snapshots
        .iter()
        .map(|snap| {
            snap.iter()
                .copied()
                .filter(|&(u, v)| keep.contains(u) && keep.contains(v))
                .collect()
        })
        .collect()
}

/// Inclusion-maximal subsets `S` of `candidates` in which all pairs are
/// connected by journeys using only `S` and the `relays`. With no relays
/// these are the closed temporal components.
pub fn maximal_components_within(
    s: &SnapshotSequence,
    kind: Kind,
    candidates: &[usize],
    relays: &[usize],
) -> Result<Vec<BTreeSet<usize>>> {
    check_limit("component enumeration", candidates.len(), COMPONENT_LIMIT)?;
    let n = s.n();
    let k = candidates.len();
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by_key(|m| Reverse(m.count_ones()));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|&f| f & m == m) {
            continue;
        }
        let mut keep = FixedBitSet::with_capacity(n);
        for &r in relays {
            keep.insert(r);
        }
        let members: Vec<usize> = (0..k).filter(|i| m >> i & 1 == 1).map(|i| candidates[i]).collect();
        for &x in &members {
            keep.insert(x);
        }
        let snaps = induced(s, &keep);
        let snaps: Vec<EdgeSet> = match kind {
            Kind::Strict => snaps,
            Kind::NonStrict => snaps.iter().map(|e| component_cliques(n, e)).collect(),
        };
        let pred = scan(n, snaps.iter());
        let connected = members
            .iter()
            .all(|&v| members.iter().all(|&u| u == v || pred[v].contains(u)));
        if connected {
            found.push(m);
        }
    }
    let mut out: Vec<BTreeSet<usize>> = found
        .into_iter()
        .map(|m| (0..k).filter(|i| m >> i & 1 == 1).map(|i| candidates[i]).collect())
        .collect();
    out.sort();
    Ok(out)
}

/// Closed maximal temporal components, `n ≤ 15`.
pub fn maximal_temporal_components(s: &SnapshotSequence, kind: Kind) -> Result<Vec<BTreeSet<String>>> {
    let all: Vec<usize> = (0..s.n()).collect();
    Ok(maximal_components_within(s, kind, &all, &[])?
        .into_iter()
        .map(|c| c.into_iter().map(|i| s.nodes.name(i).to_string()).collect())
        .collect())
}

/// Name of the gadget node attached to `u` on the edge towards `v`.
pub fn gadget_name(u: &str, v: &str) -> String {
    format!("{u}>{v}")
}

/// Replaces every edge `uv` by fresh nodes `u'`, `v'` and the timed edges
/// `(u,u')@1, (u',v)@2, (v,v')@1, (v',u)@2`; snapshot 0 stays empty.
pub fn semaphore_transform(g: &StaticGraph) -> Result<SnapshotSequence> {
    let mut names: Vec<String> = g.nodes.names();
    let pairs = g.edge_names();
    for (u, v) in &pairs {
        names.push(gadget_name(u, v));
        names.push(gadget_name(v, u));
    }
    let nodes = NodeList::new(names)?;
    let id = |x: &str| nodes.index(x).expect("known node");
    let mut one = EdgeSet::new();
    let mut two = EdgeSet::new();
    for (u, v) in &pairs {
        let (uu, vv) = (id(&gadget_name(u, v)), id(&gadget_name(v, u)));
        one.insert(edge(id(u), uu));
        one.insert(edge(id(v), vv));
        two.insert(edge(uu, id(v)));
        two.insert(edge(vv, id(u)));
    }
    SnapshotSequence::new(nodes, vec![EdgeSet::new(), one, two])
}

/// Maximal components of a semaphore-transformed graph restricted to the
/// original vertices, with gadget nodes acting as relays.
pub fn semaphore_components(g: &StaticGraph, kind: Kind) -> Result<Vec<BTreeSet<String>>> {
    let s = semaphore_transform(g)?;
    let originals: BTreeMap<usize, ()> = g
        .nodes
        .iter()
        .map(|id| (s.nodes.index(id.as_str()).expect("kept"), ()))
        .collect();
    let cand: Vec<usize> = originals.keys().copied().collect();
    let relays: Vec<usize> = (0..s.n()).filter(|i| !originals.contains_key(i)).collect();
    Ok(maximal_components_within(&s, kind, &cand, &relays)?
        .into_iter()
        .map(|c| c.into_iter().map(|i| s.nodes.name(i).to_string()).collect())
        .collect())
}
