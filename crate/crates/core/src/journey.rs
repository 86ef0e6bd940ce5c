//! Journeys: validity, foremost/shortest/fastest search, temporal distance,
//! temporal views, steady progress and desk-scale disjointness.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{check_limit, Error, Result};
use crate::graph::{Edge, Interval, NodeId, NodeList, TemporalGraph};
use crate::time::Time;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    #[default]
    Strict,
    NonStrict,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Strict => "strict",
            Kind::NonStrict => "non-strict",
        })
    }
}

/// One timed edge traversal, serialized as `[from, to, time]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hop(pub NodeId, pub NodeId, pub Time);

impl Hop {
    pub fn from(&self) -> &NodeId {
        &self.0
    }

    pub fn to(&self) -> &NodeId {
        &self.1
    }

    pub fn time(&self) -> Time {
        self.2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Journey {
    pub hops: Vec<Hop>,
    pub kind: Kind,
}

/// Quantities of a journey that depend on the graph's time model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JourneyMetrics {
    pub departure: Option<Time>,
    pub arrival: Option<Time>,
    pub hop_count: usize,
    pub duration: Time,
    pub max_wait: Time,
}

impl Journey {
    pub fn empty(kind: Kind) -> Journey {
        Journey {
            hops: Vec::new(),
            kind,
        }
    }

    pub fn hop_count(&self) -> usize {
        self.hops.len()
    }

    pub fn departure(&self) -> Option<Time> {
        self.hops.first().map(|h| h.2)
    }

    pub fn metrics(&self, g: &TemporalGraph) -> JourneyMetrics {
        let tm = TimeModel::of(g, self.kind);
        let departure = self.departure();
        let arrival = self.hops.last().map(|h| tm.arrival(h.2));
        let max_wait = self
            .hops
            .windows(2)
            .map(|w| w[1].2 - w[0].2 - tm.gap)
            .max()
            .unwrap_or(Time::ZERO);
        JourneyMetrics {
            departure,
            arrival,
            hop_count: self.hops.len(),
            duration: match (departure, arrival) {
                (Some(d), Some(a)) => a - d,
                _ => Time::ZERO,
            },
            max_wait,
        }
    }

    pub fn arrival(&self, g: &TemporalGraph) -> Option<Time> {
        self.metrics(g).arrival
    }

    pub fn duration(&self, g: &TemporalGraph) -> Time {
        self.metrics(g).duration
    }

    pub fn prefix(&self, k: usize) -> Journey {
        Journey {
            hops: self.hops[..k].to_vec(),
            kind: self.kind,
        }
    }

    /// Visited nodes, including both endpoints.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.hops.iter().map(|h| h.0.clone()).collect();
        if let Some(h) = self.hops.last() {
            out.push(h.1.clone());
        }
        out
    }
}

/// Timing rules of a graph under a journey kind.
#[derive(Clone, Copy, Debug)]
struct TimeModel {
    discrete: bool,
    /// Latency paid by a hop (0 for discrete and for non-strict journeys).
    z: Time,
    /// Minimal separation between consecutive hops.
    gap: Time,
}

impl TimeModel {
    fn of(g: &TemporalGraph, kind: Kind) -> TimeModel {
        match (g, kind) {
            (TemporalGraph::Snapshots(_), Kind::Strict) => TimeModel {
                discrete: true,
                z: Time::ZERO,
                gap: Time::ONE,
            },
            (TemporalGraph::Snapshots(_), Kind::NonStrict) => TimeModel {
                discrete: true,
                z: Time::ZERO,
                gap: Time::ZERO,
            },
            (TemporalGraph::Intervals(ig), Kind::Strict) => TimeModel {
                discrete: false,
                z: ig.latency,
                gap: ig.latency,
            },
            (TemporalGraph::Intervals(_), Kind::NonStrict) => TimeModel {
                discrete: false,
                z: Time::ZERO,
                gap: Time::ZERO,
            },
        }
    }

    fn arrival(&self, hop: Time) -> Time {
        hop + self.z
    }

    /// Earliest next-hop time after arriving at `arrival`.
    fn ready_after(&self, arrival: Time) -> Time {
        if self.discrete {
            arrival + self.gap
        } else {
            arrival
        }
    }

    /// Latest arrival compatible with a next hop at `dep`.
    fn arrival_bound_before(&self, dep: Time) -> Time {
        if self.discrete {
            dep - self.gap
        } else {
            dep
        }
    }
}

/// A supremum that may or may not be attained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sup {
    pub value: Time,
    pub attained: bool,
}

#[derive(Clone, Debug)]
enum Presence {
    Discrete(Vec<i64>),
    Continuous(Vec<Interval>),
}

/// Search structure shared by all journey algorithms.
#[derive(Clone, Debug)]
pub(crate) struct Timeline {
    n: usize,
    tm: TimeModel,
    presence: Vec<Presence>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Timeline {
    pub(crate) fn new(g: &TemporalGraph, kind: Kind) -> Timeline {
        let tm = TimeModel::of(g, kind);
        let mut edges: Vec<Edge> = Vec::new();
        let mut presence = Vec::new();
        match g {
            TemporalGraph::Snapshots(s) => {
                for (e, times) in s.presence() {
                    edges.push(e);
                    presence.push(Presence::Discrete(times));
                }
            }
            TemporalGraph::Intervals(ig) => {
                for (&e, ivs) in &ig.edges {
                    // intervals too short to carry a hop are dropped
                    let usable: Vec<Interval> =
                        ivs.iter().copied().filter(|iv| iv.start + tm.z < iv.end).collect();
                    if !usable.is_empty() {
                        edges.push(e);
                        presence.push(Presence::Continuous(usable));
                    }
                }
            }
        }
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for (slot, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, slot));
            adj[v].push((u, slot));
        }
        for a in &mut adj {
            a.sort();
        }
        Timeline {
            n,
            tm,
            presence,
            adj,
        }
    }

    fn slot_of(&self, u: usize, v: usize) -> Option<usize> {
        self.adj[u]
            .binary_search_by(|&(w, _)| w.cmp(&v))
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    /// Earliest hop time on `slot` not before `ready`.
    fn next_hop(&self, slot: usize, ready: Time) -> Option<Time> {
        match &self.presence[slot] {
            Presence::Discrete(times) => {
                let r = ready.ceil();
                let i = times.partition_point(|&t| t < r);
                times.get(i).map(|&t| Time::int(t))
            }
            Presence::Continuous(ivs) => {
                let z = self.tm.z;
                let i = ivs.partition_point(|iv| iv.end <= ready + z);
                ivs.get(i).map(|iv| ready.max(iv.start))
            }
        }
    }

    /// Latest hop time on `slot` whose arrival respects `bound`.
    fn latest_hop(&self, slot: usize, bound: Sup) -> Option<Sup> {
        match &self.presence[slot] {
            Presence::Discrete(times) => {
                let b = if bound.attained {
                    bound.value.floor()
                } else {
                    bound.value.ceil() - 1
                };
                let i = times.partition_point(|&t| t <= b);
                (i > 0).then(|| Sup {
                    value: Time::int(times[i - 1]),
                    attained: true,
                })
            }
            Presence::Continuous(ivs) => {
                let z = self.tm.z;
                let mut best: Option<Sup> = None;
                for iv in ivs.iter().rev() {
                    let by_end = Sup {
                        value: iv.end - z,
                        attained: false,
                    };
                    let by_bound = Sup {
                        value: bound.value - z,
                        attained: bound.attained,
                    };
                    let cand = if by_end.value < by_bound.value {
                        by_end
                    } else if by_bound.value < by_end.value {
                        by_bound
                    } else {
                        Sup {
                            value: by_end.value,
                            attained: false,
                        }
                    };
                    let ok = cand.value > iv.start || (cand.value == iv.start && cand.attained);
                    if ok {
                        best = Some(cand);
                        break;
                    }
                }
                best
            }
        }
    }

    fn can_hop_at(&self, slot: usize, t: Time) -> bool {
        match &self.presence[slot] {
            Presence::Discrete(times) => t.as_int().is_some_and(|t| times.binary_search(&t).is_ok()),
            Presence::Continuous(ivs) => ivs.iter().any(|iv| iv.start <= t && t + self.tm.z < iv.end),
        }
    }
}

/// Foremost search result: arrivals and a foremost tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachabilityTable {
    pub nodes: NodeList,
    pub source: usize,
    pub start: Time,
    pub kind: Kind,
    pub arrival: Vec<Option<Time>>,
    /// Parent node and hop time in the foremost tree.
    pub parent: Vec<Option<(usize, Time)>>,
    pub depth: Vec<Option<usize>>,
}

impl ReachabilityTable {
    pub fn arrival_of(&self, id: &str) -> Option<Time> {
        self.nodes.index(id).and_then(|i| self.arrival[i])
    }

    pub fn reached(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrival.len()).filter(|&i| self.arrival[i].is_some())
    }

    /// Tree journey from the source to `v`.
    pub fn journey_to(&self, v: usize) -> Option<Journey> {
        self.arrival[v]?;
        let mut hops = Vec::new();
        let mut cur = v;
        while let Some((p, t)) = self.parent[cur] {
            hops.push(Hop(self.nodes.get(p).clone(), self.nodes.get(cur).clone(), t));
            cur = p;
        }
        hops.reverse();
        Some(Journey {
            hops,
            kind: self.kind,
        })
    }

    /// Parent map by name, for comparing trees.
    pub fn parent_names(&self) -> BTreeMap<String, String> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| {
                p.map(|(u, _)| (self.nodes.name(v).to_string(), self.nodes.name(u).to_string()))
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let arrival: BTreeMap<&str, Option<Time>> = (0..self.nodes.len())
            .map(|i| (self.nodes.name(i), self.arrival[i]))
            .collect();
        let parent: BTreeMap<&str, (&str, Time)> = (0..self.nodes.len())
            .filter_map(|i| self.parent[i].map(|(p, t)| (self.nodes.name(i), (self.nodes.name(p), t))))
            .collect();
        serde_json::json!({
            "source": self.nodes.name(self.source),
            "start": self.start,
            "kind": self.kind,
            "arrival": arrival,
            "parent": parent,
        })
    }
}

/// Arrival, parent and depth per node.
type ForemostRows = (Vec<Option<Time>>, Vec<Option<(usize, Time)>>, Vec<Option<usize>>);

fn foremost(tl: &Timeline, src: usize, t0: Time, allowed: Option<&FixedBitSet>) -> ForemostRows {
    let n = tl.n;
    let ok = |v: usize| allowed.is_none_or(|a| a.contains(v));
    let mut arr: Vec<Option<Time>> = vec![None; n];
    let mut done = vec![false; n];
    let ready_of = |u: usize, a: Time| if u == src { t0 } else { tl.tm.ready_after(a) };
    arr[src] = Some(t0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((t0, src)));
    while let Some(Reverse((a, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let ready = ready_of(u, a);
        for &(w, slot) in &tl.adj[u] {
            if !ok(w) || done[w] {
                continue;
            }
            if let Some(tau) = tl.next_hop(slot, ready) {
                let na = tl.tm.arrival(tau);
                if arr[w].is_none_or(|x| na < x) {
                    arr[w] = Some(na);
                    heap.push(Reverse((na, w)));
                }
            }
        }
    }
    // among foremost parents prefer fewer hops, then the smaller identifier
    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    depth[src] = Some(0);
    let mut frontier = vec![src];
    let mut d = 0;
    while !frontier.is_empty() {
        frontier.sort_unstable();
        let mut next = Vec::new();
        for &u in &frontier {
            let ready = ready_of(u, arr[u].expect("reached"));
            for &(w, slot) in &tl.adj[u] {
                if depth[w].is_some() || !ok(w) {
                    continue;
                }
                if let Some(tau) = tl.next_hop(slot, ready) {
                    if Some(tl.tm.arrival(tau)) == arr[w] {
                        depth[w] = Some(d + 1);
                        parent[w] = Some((u, tau));
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
        d += 1;
    }
    (arr, parent, depth)
}

fn check_start(g: &TemporalGraph, t0: Time) -> Result<()> {
    let life = g
        .lifetime()
        .ok_or_else(|| Error::range("graph has an empty lifetime"))?;
    if t0 < life.start || t0 > life.end {
        return Err(Error::range(format!(
            "time {t0} is outside the lifetime [{},{})",
            life.start, life.end
        )));
    }
    Ok(())
}

fn table(g: &TemporalGraph, tl: &Timeline, src: usize, t0: Time, kind: Kind) -> ReachabilityTable {
    let (arrival, parent, depth) = foremost(tl, src, t0, None);
    ReachabilityTable {
        nodes: g.nodes().clone(),
        source: src,
        start: t0,
        kind,
        arrival,
        parent,
        depth,
    }
}

/// Foremost arrivals from `src` over journeys departing at or after `t0`.
pub fn earliest_arrival(g: &TemporalGraph, src: &str, t0: Time, kind: Kind) -> Result<ReachabilityTable> {
    let s = g.nodes().require(src)?;
    check_start(g, t0)?;
    Ok(table(g, &Timeline::new(g, kind), s, t0, kind))
}

/// Checks every journey invariant against `g`.
pub fn validate_journey(g: &TemporalGraph, j: &Journey) -> Result<bool> {
    let nodes = g.nodes();
    let tl = Timeline::new(g, j.kind);
    let fp = g.footprint();
    let mut slots = Vec::new();
    for h in &j.hops {
        let u = nodes.require(h.0.as_str())?;
        let v = nodes.require(h.1.as_str())?;
        if u == v || !fp.has_edge(u, v) {
            return Err(Error::input(format!("unknown edge {}-{}", h.0, h.1)));
        }
        slots.push(tl.slot_of(u, v));
    }
    for w in j.hops.windows(2) {
        if w[0].1 != w[1].0 {
            return Ok(false);
        }
        if w[1].2 < w[0].2 + tl.tm.gap {
            return Ok(false);
        }
    }
    for (h, slot) in j.hops.iter().zip(slots) {
        match slot {
            Some(s) if tl.can_hop_at(s, h.2) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Distance from `u` to every node when starting at time `t`.
///
/// In discrete traces a journey starting at `t` uses hops strictly after
/// `t`, so a hop at `t + 1` costs one step.
pub fn temporal_distance(
    g: &TemporalGraph,
    u: &str,
    t: Time,
    kind: Kind,
) -> Result<Vec<(NodeId, Option<Time>)>> {
    let s = g.nodes().require(u)?;
    let tl = Timeline::new(g, kind);
    Ok(distances(g, &tl, s, t)
        .into_iter()
        .enumerate()
        .map(|(v, d)| (g.nodes().get(v).clone(), d))
        .collect())
}

fn distances(g: &TemporalGraph, tl: &Timeline, s: usize, t: Time) -> Vec<Option<Time>> {
    let t0 = if g.is_discrete() { Time::int(t.floor() + 1) } else { t };
    let (arr, _, _) = foremost(tl, s, t0, None);
    arr.iter()
        .enumerate()
        .map(|(v, a)| if v == s { Some(Time::ZERO) } else { a.map(|a| a - t) })
        .collect()
}

/// Largest temporal distance from `u` at `t`; `None` stands for infinity.
pub fn eccentricity(g: &TemporalGraph, u: &str, t: Time, kind: Kind) -> Result<Option<Time>> {
    let s = g.nodes().require(u)?;
    let tl = Timeline::new(g, kind);
    Ok(ecc_of(g, &tl, s, t))
}

fn ecc_of(g: &TemporalGraph, tl: &Timeline, s: usize, t: Time) -> Option<Time> {
    distances(g, tl, s, t)
        .into_iter()
        .try_fold(Time::ZERO, |m, d| d.map(|d| m.max(d)))
}

pub fn temporal_diameter_at(g: &TemporalGraph, t: Time, kind: Kind) -> Option<Time> {
    let tl = Timeline::new(g, kind);
    (0..g.n()).try_fold(Time::ZERO, |m, s| ecc_of(g, &tl, s, t).map(|e| m.max(e)))
}

/// Latest departure from `u` of a journey reaching `v` by `t`, as a
/// supremum together with whether it is attained.
pub fn latest_departure_exact(g: &TemporalGraph, u: &str, v: &str, t: Time, kind: Kind) -> Result<Option<Sup>> {
    let nodes = g.nodes();
    let (s, d) = (nodes.require(u)?, nodes.require(v)?);
    if s == d {
        return Ok(Some(Sup {
            value: t,
            attained: true,
        }));
    }
    let tl = Timeline::new(g, kind);
    let n = tl.n;
    // bound[x]: latest admissible arrival at x
    let mut bound: Vec<Option<Sup>> = vec![None; n];
    let mut dep: Vec<Option<Sup>> = vec![None; n];
    let mut done = vec![false; n];
    bound[d] = Some(Sup {
        value: t,
        attained: true,
    });
    let mut heap = BinaryHeap::new();
    heap.push((bound[d].unwrap(), d));
    while let Some((b, x)) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(w, slot) in &tl.adj[x] {
            if done[w] || w == d {
                continue;
            }
            if let Some(tau) = tl.latest_hop(slot, b) {
                if dep[w].is_none_or(|cur| tau > cur) {
                    dep[w] = Some(tau);
                    let nb = Sup {
                        value: tl.tm.arrival_bound_before(tau.value),
                        attained: tau.attained,
                    };
                    bound[w] = Some(nb);
                    heap.push((nb, w));
                }
            }
        }
    }
    Ok(dep[s])
}

/// Temporal view: latest departure from `u` such that `v` is reached by `t`.
/// Returns the supremum, which need not be attained in continuous time.
pub fn latest_departure(g: &TemporalGraph, u: &str, v: &str, t: Time, kind: Kind) -> Result<Option<Time>> {
    Ok(latest_departure_exact(g, u, v, t, kind)?.map(|s| s.value))
}

/// Minimum-hop journey departing at or after `t0`; among those, the
/// earliest arriving.
pub fn shortest_journey(g: &TemporalGraph, u: &str, v: &str, t0: Time, kind: Kind) -> Result<Option<Journey>> {
    let nodes = g.nodes();
    let (s, d) = (nodes.require(u)?, nodes.require(v)?);
    if s == d {
        return Ok(Some(Journey::empty(kind)));
    }
    let tl = Timeline::new(g, kind);
    let n = tl.n;
    let mut cur: Vec<Option<Time>> = vec![None; n];
    cur[s] = Some(t0);
    let mut parents: Vec<Vec<Option<(usize, Time)>>> = vec![vec![None; n]];
    for _ in 1..n {
        let mut next = cur.clone();
        let mut par = parents.last().unwrap().clone();
        for x in 0..n {
            let Some(a) = cur[x] else { continue };
            let ready = if x == s { t0 } else { tl.tm.ready_after(a) };
            for &(w, slot) in &tl.adj[x] {
                if w == s {
                    continue;
                }
                if let Some(tau) = tl.next_hop(slot, ready) {
                    let na = tl.tm.arrival(tau);
                    if next[w].is_none_or(|c| na < c) {
                        next[w] = Some(na);
                        par[w] = Some((x, tau));
                    }
                }
            }
        }
        parents.push(par);
        if next[d].is_some() {
            let mut hops = Vec::new();
            let (mut node, mut layer) = (d, parents.len() - 1);
            while node != s {
                let (p, t) = parents[layer][node].expect("layered parent");
                hops.push(Hop(nodes.get(p).clone(), nodes.get(node).clone(), t));
                node = p;
                layer -= 1;
            }
            hops.reverse();
            return Ok(Some(Journey { hops, kind }));
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(None)
}

fn restrict(g: &TemporalGraph, window: Option<(Time, Time)>) -> Result<TemporalGraph> {
    match window {
        Some((a, b)) => g.temporal_subgraph(a, b),
        None => Ok(g.clone()),
    }
}

/// Minimum-duration journey inside `window`, ties broken by earlier departure.
pub fn fastest_journey(
    g: &TemporalGraph,
    u: &str,
    v: &str,
    window: Option<(Time, Time)>,
    kind: Kind,
) -> Result<Option<Journey>> {
    let nodes = g.nodes();
    let (s, d) = (nodes.require(u)?, nodes.require(v)?);
    if s == d {
        return Ok(Some(Journey::empty(kind)));
    }
    let sub = restrict(g, window)?;
    let tl = Timeline::new(&sub, kind);
    let mut cands = BTreeSet::new();
    for &(_, slot) in &tl.adj[s] {
        match &tl.presence[slot] {
            Presence::Discrete(times) => cands.extend(times.iter().map(|&t| Time::int(t))),
            Presence::Continuous(ivs) => {
                for iv in ivs {
                    cands.insert(iv.start);
                }
            }
        }
    }
    if !sub.is_discrete() {
        // a direct journey may wait for a later edge and start earlier by k latencies
        let mut starts = BTreeSet::new();
        for p in &tl.presence {
            if let Presence::Continuous(ivs) = p {
                starts.extend(ivs.iter().map(|iv| iv.start));
            }
        }
        if let Some(life) = sub.lifetime() {
            starts.insert(life.start);
        }
        for c in starts {
            for k in 0..tl.n as i64 {
                cands.insert(c - tl.tm.z * k);
            }
        }
        if let Some(life) = sub.lifetime() {
            cands.retain(|&c| c >= life.start && c < life.end);
        }
    }
    let mut best: Option<(Time, Time, Journey)> = None;
    for c in cands {
        let (arr, parent, depth) = foremost(&tl, s, c, None);
        if arr[d].is_none() {
            continue;
        }
        let rt = ReachabilityTable {
            nodes: sub.nodes().clone(),
            source: s,
            start: c,
            kind,
            arrival: arr,
            parent,
            depth,
        };
        let j = rt.journey_to(d).expect("reached");
        let m = j.metrics(&sub);
        let key = (m.duration, m.departure.expect("non-empty"));
        if best.as_ref().is_none_or(|b| key < (b.0, b.1)) {
            best = Some((key.0, key.1, j));
        }
    }
    Ok(best.map(|b| b.2))
}

/// Foremost trees over a range of initiation times: the range is cut at
/// every date where the tree can change, and equal consecutive trees are
/// merged. Each entry is the half-open range and its parent map.
pub fn foremost_tree_intervals(
    g: &TemporalGraph,
    src: &str,
    range: (Time, Time),
    kind: Kind,
) -> Result<Vec<(Interval, BTreeMap<String, String>)>> {
    let s = g.nodes().require(src)?;
    let tl = Timeline::new(g, kind);
    let (a, b) = range;
    if a >= b {
        return Err(Error::range("empty initiation range"));
    }
    let mut cuts = BTreeSet::new();
    cuts.insert(a);
    let step = if g.is_discrete() { Time::ONE } else { tl.tm.z };
    let mut dates = BTreeSet::new();
    for p in &tl.presence {
        match p {
            Presence::Discrete(ts) => dates.extend(ts.iter().map(|&t| Time::int(t))),
            Presence::Continuous(ivs) => {
                for iv in ivs {
                    dates.insert(iv.start);
                    dates.insert(iv.end);
                }
            }
        }
    }
    for c in dates {
        for k in 0..=tl.n as i64 {
            let x = c - step * k;
            if a < x && x < b {
                cuts.insert(x);
            }
        }
    }
    let cuts: Vec<Time> = cuts.into_iter().collect();
    let mut out: Vec<(Interval, BTreeMap<String, String>)> = Vec::new();
    for (i, &c) in cuts.iter().enumerate() {
        let end = cuts.get(i + 1).copied().unwrap_or(b);
        let tree = table(g, &tl, s, c, kind).parent_names();
        match out.last_mut() {
            Some(last) if last.1 == tree => last.0.end = end,
            _ => out.push((Interval::new(c, end), tree)),
        }
    }
    Ok(out)
}

fn candidate_alphas(dates: &BTreeSet<Time>, z: Time, n: usize) -> Vec<Time> {
    let mut out = BTreeSet::new();
    out.insert(Time::ZERO);
    let n = n.max(1) as i64;
    let dates: Vec<Time> = dates.iter().copied().collect();
    for &c1 in &dates {
        for &c2 in &dates {
            for m in -2 * n..=2 * n {
                let num = c1 - c2 + z * m;
                if num.is_negative() {
                    continue;
                }
                for k in 1..=n {
                    out.insert(num.div_int(k));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Insert closed interval `[a, b]` into a sorted disjoint union; returns the
/// newly covered parts.
fn cover(set: &mut Vec<(Time, Time)>, a: Time, b: Time) -> Vec<(Time, Time)> {
    let mut fresh = Vec::new();
    let mut cur = a;
    for &(x, y) in set.iter() {
        if y < cur {
            continue;
        }
        if x > b {
            break;
        }
        if x > cur {
            fresh.push((cur, x.min(b)));
        }
        cur = cur.max(y);
        if cur >= b {
            break;
        }
    }
    if cur < b || (fresh.is_empty() && cur == a && !set.iter().any(|&(x, y)| x <= a && a <= y)) {
        fresh.push((cur, b));
    }
    if !fresh.is_empty() {
        set.push((a, b));
        set.sort();
        let mut merged: Vec<(Time, Time)> = Vec::new();
        for (x, y) in set.drain(..) {
            match merged.last_mut() {
                Some(l) if x <= l.1 => l.1 = l.1.max(y),
                _ => merged.push((x, y)),
            }
        }
        *set = merged;
    }
    fresh
}

/// Nodes reachable from `s` with every wait (including the initial one from
/// `ws`) at most `alpha`.
fn reach_with_alpha(tl: &Timeline, s: usize, ws: Time, alpha: Time) -> Vec<bool> {
    let n = tl.n;
    let mut hit = vec![false; n];
    if tl.tm.discrete {
        let gap = tl.tm.gap.floor();
        let a = alpha.floor();
        let mut seen: BTreeSet<(usize, i64)> = BTreeSet::new();
        let mut stack = vec![(s, ws.floor() - gap)];
        while let Some((x, arr)) = stack.pop() {
            for &(w, slot) in &tl.adj[x] {
                let Presence::Discrete(times) = &tl.presence[slot] else { unreachable!() };
                let lo = times.partition_point(|&t| t < arr + gap);
                for &t in times[lo..].iter().take_while(|&&t| t <= arr + gap + a) {
                    hit[w] = true;
                    if seen.insert((w, t)) {
                        stack.push((w, t));
                    }
                }
            }
        }
    } else {
        let z = tl.tm.z;
        let mut ready: Vec<Vec<(Time, Time)>> = vec![Vec::new(); n];
        ready[s].push((ws, ws));
        let mut work = vec![(s, ws, ws)];
        while let Some((x, lo, hi)) = work.pop() {
            for &(w, slot) in &tl.adj[x] {
                let Presence::Continuous(ivs) = &tl.presence[slot] else { unreachable!() };
                for iv in ivs {
                    let tlo = lo.max(iv.start);
                    let thi = (hi + alpha).min(iv.end - z);
                    if tlo > thi {
                        continue;
                    }
                    hit[w] = true;
                    for (p, q) in cover(&mut ready[w], tlo + z, thi + z) {
                        work.push((w, p, q));
                    }
                }
            }
        }
    }
    hit
}

fn alpha_search(
    sub: &TemporalGraph,
    tl: &Timeline,
    pairs: &[(usize, usize)],
) -> Option<Time> {
    let life = sub.lifetime()?;
    let ws = life.start;
    let feasible = |alpha: Time| {
        let mut by_src: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(u, v) in pairs {
            by_src.entry(u).or_default().push(v);
        }
        by_src.iter().all(|(&u, vs)| {
            let hit = reach_with_alpha(tl, u, ws, alpha);
            vs.iter().all(|&v| hit[v])
        })
    };
    let cands: Vec<Time> = if tl.tm.discrete {
        let span = (life.end - life.start).ceil();
        (0..=span).map(Time::int).collect()
    } else {
        let mut dates = BTreeSet::new();
        dates.insert(ws);
        for p in &tl.presence {
            if let Presence::Continuous(ivs) = p {
                for iv in ivs {
                    dates.insert(iv.start);
                    dates.insert(iv.end);
                }
            }
        }
        candidate_alphas(&dates, tl.tm.z, tl.n)
    };
    if !feasible(*cands.last()?) {
        return None;
    }
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(cands[lo])
}

/// Smallest α such that every ordered pair has a journey inside the window
/// whose waits, including the initial wait from the window start, are all
/// at most α. `None` if some pair is unreachable.
///
/// In continuous time the value is an infimum and is searched among the
/// breakpoints generated by chains of at most n hops.
pub fn steady_progress_alpha(g: &TemporalGraph, window: Option<(Time, Time)>, kind: Kind) -> Result<Option<Time>> {
    let sub = restrict(g, window)?;
    let tl = Timeline::new(&sub, kind);
    let n = sub.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    if pairs.is_empty() {
        return Ok(Some(Time::ZERO));
    }
    Ok(alpha_search(&sub, &tl, &pairs))
}

/// Steady-progress value of a single ordered pair.
pub fn steady_progress_pair(
    g: &TemporalGraph,
    u: &str,
    v: &str,
    window: Option<(Time, Time)>,
    kind: Kind,
) -> Result<Option<Time>> {
    let nodes = g.nodes();
    let (s, d) = (nodes.require(u)?, nodes.require(v)?);
    if s == d {
        return Ok(Some(Time::ZERO));
    }
    let sub = restrict(g, window)?;
    let tl = Timeline::new(&sub, kind);
    Ok(alpha_search(&sub, &tl, &[(s, d)]))
}

pub const DISJOINT_LIMIT: usize = 12;

/// Minimal sets of internal nodes that carry an s-t journey on their own.
/// Returns (direct journey exists, minimal sets as masks over `internal`).
fn minimal_supports(g: &TemporalGraph, s: usize, t: usize, kind: Kind) -> (bool, Vec<usize>, Vec<u32>) {
    let n = g.n();
    let tl = Timeline::new(g, kind);
    let internal: Vec<usize> = (0..n).filter(|&x| x != s && x != t).collect();
    let k = internal.len();
    let start = g.lifetime().map(|l| l.start).unwrap_or(Time::ZERO);
    let supports = |mask: u32, skip_direct: bool| {
        let mut allowed = FixedBitSet::with_capacity(n);
        allowed.insert(s);
        allowed.insert(t);
        for (i, &x) in internal.iter().enumerate() {
            if mask >> i & 1 == 1 {
                allowed.insert(x);
            }
        }
        let mut tl2;
        let tlr = if skip_direct {
            tl2 = tl.clone();
            tl2.adj[s].retain(|&(w, _)| w != t);
            tl2.adj[t].retain(|&(w, _)| w != s);
            &tl2
        } else {
            &tl
        };
        foremost(tlr, s, start, Some(&allowed)).0[t].is_some()
    };
    let direct = supports(0, false);
    let mut minimal: Vec<u32> = Vec::new();
    let mut masks: Vec<u32> = (1..(1u32 << k)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for m in masks {
        if minimal.iter().any(|&x| x & !m == 0) {
            continue;
        }
        if supports(m, true) {
            minimal.push(m);
        }
    }
    (direct, internal, minimal)
}

fn max_packing(sets: &[u32], used: u32, from: usize) -> usize {
    let mut best = 0;
    for i in from..sets.len() {
        if sets[i] & used == 0 {
            best = best.max(1 + max_packing(sets, used | sets[i], i + 1));
        }
    }
    best
}

/// Maximum number of internally node-disjoint s-t journeys. A direct edge
/// journey counts once. Brute force, `n ≤ 12`.
pub fn max_disjoint_journeys(g: &TemporalGraph, s: &str, t: &str, kind: Kind) -> Result<usize> {
    check_limit("disjoint-journey search", g.n(), DISJOINT_LIMIT)?;
    let (a, b) = (g.nodes().require(s)?, g.nodes().require(t)?);
    if a == b {
        return Err(Error::input("source and target must differ"));
    }
    let (direct, _, minimal) = minimal_supports(g, a, b, kind);
    Ok(usize::from(direct) + max_packing(&minimal, 0, 0))
}

/// Size of the smallest internal node set whose removal destroys every s-t
/// journey; `None` when a direct journey makes this impossible.
pub fn min_temporal_separator(g: &TemporalGraph, s: &str, t: &str, kind: Kind) -> Result<Option<usize>> {
    check_limit("separator search", g.n(), DISJOINT_LIMIT)?;
    let (a, b) = (g.nodes().require(s)?, g.nodes().require(t)?);
    if a == b {
        return Err(Error::input("source and target must differ"));
    }
    let (direct, internal, minimal) = minimal_supports(g, a, b, kind);
    if direct {
        return Ok(None);
    }
    let k = internal.len();
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|m| m.count_ones());
    Ok(masks
        .into_iter()
        .find(|&cut| minimal.iter().all(|&m| m & cut != 0))
        .map(|m| m.count_ones() as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{IntervalGraph, SnapshotSequence};
    use crate::time::t;

    fn journey_fig() -> TemporalGraph {
        SnapshotSequence::from_names(
            &["a", "b", "c", "d", "e"],
            &[
                &[("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")],
                &[("a", "b"), ("b", "c"), ("c", "d")],
                &[("a", "b"), ("c", "d"), ("c", "e"), ("d", "e")],
                &[("c", "e"), ("d", "e")],
            ],
        )
        .unwrap()
        .into()
    }

    fn basic() -> TemporalGraph {
        IntervalGraph::from_names(
            &["a", "b", "c"],
            &[
                ("a", "b", &[(t("0"), t("4"))]),
                ("b", "c", &[(t("1"), t("3")), (t("5"), t("6"))]),
            ],
            t("0.1"),
        )
        .unwrap()
        .into()
    }

    fn hop(u: &str, v: &str, time: i64) -> Hop {
        Hop(NodeId::new(u).unwrap(), NodeId::new(v).unwrap(), Time::int(time))
    }

    #[test]
    fn validates_figure_journeys() {
        let g = journey_fig();
        let j = Journey {
            hops: vec![hop("a", "c", 0), hop("c", "d", 1), hop("d", "e", 3)],
            kind: Kind::Strict,
        };
        assert!(validate_journey(&g, &j).unwrap());
        let bad = Journey {
            hops: vec![hop("a", "c", 0), hop("c", "d", 0)],
            kind: Kind::Strict,
        };
        assert!(!validate_journey(&g, &bad).unwrap());
        let ns = Journey {
            kind: Kind::NonStrict,
            ..bad.clone()
        };
        assert!(validate_journey(&g, &ns).unwrap());
        let g2: TemporalGraph = SnapshotSequence::from_names(&["a", "c", "d"], &[&[("a", "c"), ("c", "d")]])
            .unwrap()
            .into();
        assert!(validate_journey(&g2, &ns).unwrap());
        let unknown = Journey {
            hops: vec![hop("a", "e", 0)],
            kind: Kind::Strict,
        };
        assert!(validate_journey(&g, &unknown).is_err());
    }

    #[test]
    fn foremost_example_arrivals() {
        let rt = earliest_arrival(&journey_fig(), "a", Time::ZERO, Kind::Strict).unwrap();
        let got: Vec<i64> = rt.arrival.iter().map(|a| a.unwrap().as_int().unwrap()).collect();
        assert_eq!(got, vec![0, 1, 0, 1, 2]);
        for v in rt.reached() {
            let j = rt.journey_to(v).unwrap();
            assert!(validate_journey(&journey_fig(), &j).unwrap());
        }
    }

    #[test]
    fn isolated_source() {
        let g: TemporalGraph = SnapshotSequence::from_names(&["a", "b", "c"], &[&[("b", "c")]]).unwrap().into();
        let rt = earliest_arrival(&g, "a", Time::ZERO, Kind::Strict).unwrap();
        assert_eq!(rt.reached().count(), 1);
        assert!(earliest_arrival(&g, "a", Time::int(5), Kind::Strict).is_err());
    }

    #[test]
    fn basic_graph_distances_and_views() {
        let g = basic();
        let dist = |time: &str| {
            temporal_distance(&g, "a", t(time), Kind::Strict).unwrap()[2].1.unwrap()
        };
        assert_eq!(dist("0"), t("1.1"));
        assert_eq!(dist("2"), t("0.2"));
        assert_eq!(dist("3"), t("2.1"));
        let view = |time: &str| latest_departure(&g, "a", "c", t(time), Kind::Strict).unwrap().unwrap();
        assert_eq!(view("1.1"), t("0.9"));
        assert_eq!(view("3"), t("2.8"));
        assert_eq!(view("5.2"), t("3.9"));
        assert_eq!(latest_departure(&g, "a", "c", t("1.05"), Kind::Strict).unwrap(), None);
    }

    #[test]
    fn weekly_line_eccentricity() {
        let names = ["a", "b", "c", "d", "e", "f"];
        let mut snaps: Vec<Vec<(&str, &str)>> = vec![Vec::new(); 49];
        for (i, s) in snaps.iter_mut().enumerate() {
            let day = i % 7;
            if (1..=5).contains(&day) {
                s.push((names[day - 1], names[day]));
            }
        }
        let refs: Vec<&[(&str, &str)]> = snaps.iter().map(|s| s.as_slice()).collect();
        let g: TemporalGraph = SnapshotSequence::from_names(&names, &refs).unwrap().into();
        let ecc = |u: &str, time: i64| eccentricity(&g, u, Time::int(time), Kind::Strict).unwrap().unwrap();
        assert_eq!(ecc("a", 0), Time::int(5));
        assert_eq!(ecc("a", 1), Time::int(11));
        assert_eq!(ecc("f", 0), Time::int(29));
    }

    #[test]
    fn empty_journeys_for_equal_endpoints() {
        let g = journey_fig();
        let j = shortest_journey(&g, "a", "a", Time::ZERO, Kind::Strict).unwrap().unwrap();
        assert_eq!(j.hop_count(), 0);
        let f = fastest_journey(&g, "b", "b", None, Kind::Strict).unwrap().unwrap();
        assert_eq!(f.duration(&g), Time::ZERO);
    }

    #[test]
    fn menger_counterexample() {
        let g: TemporalGraph = {
            let mut snaps: Vec<Vec<(&str, &str)>> = vec![Vec::new(); 8];
            for (u, v, time) in [
                ("s", "v1", 5),
                ("s", "v2", 1),
                ("v1", "t", 3),
                ("v1", "v2", 2),
                ("v1", "v3", 6),
                ("v2", "v3", 4),
                ("v3", "t", 7),
            ] {
                snaps[time].push((u, v));
            }
            let refs: Vec<&[(&str, &str)]> = snaps.iter().map(|s| s.as_slice()).collect();
            SnapshotSequence::from_names(&["s", "t", "v1", "v2", "v3"], &refs).unwrap().into()
        };
        assert_eq!(max_disjoint_journeys(&g, "s", "t", Kind::Strict).unwrap(), 1);
        assert_eq!(min_temporal_separator(&g, "s", "t", Kind::Strict).unwrap(), Some(2));
    }

    #[test]
    fn direct_edge_has_no_separator() {
        let g: TemporalGraph =
            SnapshotSequence::from_names(&["s", "t", "x"], &[&[("s", "t"), ("s", "x"), ("x", "t")]])
                .unwrap()
                .into();
        assert_eq!(min_temporal_separator(&g, "s", "t", Kind::NonStrict).unwrap(), None);
        assert_eq!(max_disjoint_journeys(&g, "s", "t", Kind::NonStrict).unwrap(), 2);
    }

    #[test]
    fn alpha_trivial_cases() {
        let all = [("a", "b"), ("a", "c"), ("b", "c")];
        let g: TemporalGraph = SnapshotSequence::from_names(&["a", "b", "c"], &[&all, &all, &all]).unwrap().into();
        assert_eq!(steady_progress_alpha(&g, None, Kind::Strict).unwrap(), Some(Time::ZERO));
        let h: TemporalGraph = SnapshotSequence::from_names(&["a", "b", "c"], &[&[("a", "b")]]).unwrap().into();
        assert_eq!(steady_progress_alpha(&h, None, Kind::Strict).unwrap(), None);
    }

    #[test]
    fn cover_tracks_new_parts() {
        let mut set = vec![];
        assert_eq!(cover(&mut set, t("1"), t("2")), vec![(t("1"), t("2"))]);
        assert_eq!(cover(&mut set, t("1"), t("2")), vec![]);
        assert_eq!(cover(&mut set, t("0"), t("3")), vec![(t("0"), t("1")), (t("2"), t("3"))]);
        assert_eq!(set, vec![(t("0"), t("3"))]);
        assert_eq!(cover(&mut set, t("5"), t("5")), vec![(t("5"), t("5"))]);
        assert_eq!(cover(&mut set, t("5"), t("5")), vec![]);
    }
}
