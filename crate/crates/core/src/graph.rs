//! Temporal graph data model: static graphs, snapshot sequences and
//! interval-labelled graphs, with the derived static views.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Time;

/// Opaque, case-sensitive node identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<NodeId> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::input("node identifiers must be non-empty"));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Undirected edge between two node indices, stored with `0 < 1`.
pub type Edge = (usize, usize);
pub type EdgeSet = BTreeSet<Edge>;

/// Normalizes an unordered pair. Panics on self-loops.
pub fn edge(u: usize, v: usize) -> Edge {
    assert_ne!(u, v, "self-loop");
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Sorted, duplicate-free list of node identifiers. Node indices used
/// throughout the crate refer to positions in this list, so index order
/// coincides with lexicographic identifier order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodeList {
    ids: Vec<NodeId>,
}

impl NodeList {
    pub fn new<I, S>(ids: I) -> Result<NodeList>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Vec::new();
        for id in ids {
            out.push(NodeId::new(id)?);
        }
        out.sort();
        if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("duplicate node `{}`", w[0])));
        }
        Ok(NodeList { ids: out })
    }

    /// Builds the list without rejecting duplicates.
    pub fn collect<I, S>(ids: I) -> Result<NodeList>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = ids.into_iter().map(Into::into).collect();
        NodeList::new(set)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize) -> &NodeId {
        &self.ids[i]
    }

    pub fn name(&self, i: usize) -> &str {
        self.ids[i].as_str()
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index(id)
            .ok_or_else(|| Error::input(format!("unknown node `{id}`")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeId> {
        self.ids.iter()
    }

    pub fn names(&self) -> Vec<String> {
        self.ids.iter().map(|n| n.0.clone()).collect()
    }

    pub(crate) fn edge_by_name(&self, u: &str, v: &str) -> Result<Edge> {
        let a = self.require(u)?;
        let b = self.require(v)?;
        if a == b {
            return Err(Error::input(format!("self-loop on `{u}`")));
        }
        Ok(edge(a, b))
    }

    /// Restriction to the given indices (kept in order).
    pub fn subset(&self, keep: &[usize]) -> NodeList {
        NodeList {
            ids: keep.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}

/// Standard undirected graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticGraph {
    pub nodes: NodeList,
    pub edges: EdgeSet,
}

impl StaticGraph {
    pub fn new(nodes: NodeList, edges: EdgeSet) -> Result<StaticGraph> {
        for &(u, v) in &edges {
            if u >= v || v >= nodes.len() {
                return Err(Error::input("edge endpoints out of range"));
            }
        }
        Ok(StaticGraph { nodes, edges })
    }

    pub fn from_names(nodes: &[&str], edges: &[(&str, &str)]) -> Result<StaticGraph> {
        let nodes = NodeList::new(nodes.iter().copied())?;
        let mut set = EdgeSet::new();
        for (u, v) in edges {
            set.insert(nodes.edge_by_name(u, v)?);
        }
        Ok(StaticGraph { nodes, edges: set })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&edge(u, v))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        adjacency(self.n(), &self.edges)
    }

    pub fn is_connected(&self) -> bool {
        components(self.n(), &self.edges).len() <= 1
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.edges.len() == n * n.saturating_sub(1) / 2
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(u, v)| (self.nodes.name(u).to_string(), self.nodes.name(v).to_string()))
            .collect()
    }
}

pub(crate) fn adjacency(n: usize, edges: &EdgeSet) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Connected components, each sorted, listed by smallest member.
pub fn components(n: usize, edges: &EdgeSet) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Discrete temporal graph: a sequence of edge sets over a fixed node set.
/// Snapshot `i` describes absolute time `origin + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapshotSequence {
    pub nodes: NodeList,
    pub snapshots: Vec<EdgeSet>,
    pub origin: i64,
}

impl SnapshotSequence {
    pub fn new(nodes: NodeList, snapshots: Vec<EdgeSet>) -> Result<SnapshotSequence> {
        Self::with_origin(nodes, snapshots, 0)
    }

    pub fn with_origin(
        nodes: NodeList,
        snapshots: Vec<EdgeSet>,
        origin: i64,
    ) -> Result<SnapshotSequence> {
        if snapshots.is_empty() {
            return Err(Error::input("a snapshot sequence needs at least one snapshot"));
        }
        for s in &snapshots {
            for &(u, v) in s {
                if u >= v || v >= nodes.len() {
                    return Err(Error::input("edge endpoints out of range"));
                }
            }
        }
        Ok(SnapshotSequence {
            nodes,
            snapshots,
            origin,
        })
    }

    pub fn from_names(nodes: &[&str], snapshots: &[&[(&str, &str)]]) -> Result<SnapshotSequence> {
        let nodes = NodeList::new(nodes.iter().copied())?;
        let mut out = Vec::new();
        for s in snapshots {
            let mut set = EdgeSet::new();
            for (u, v) in s.iter() {
                set.insert(nodes.edge_by_name(u, v)?);
            }
            out.push(set);
        }
        SnapshotSequence::new(nodes, out)
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Number of snapshots (δ).
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn time_of(&self, i: usize) -> i64 {
        self.origin + i as i64
    }

    /// Local index of an absolute time, if inside the lifetime.
    pub fn index_of(&self, t: i64) -> Option<usize> {
        let i = t - self.origin;
        (i >= 0 && (i as usize) < self.len()).then_some(i as usize)
    }

    /// Half-open lifetime `[origin, origin + δ)`.
    pub fn lifetime(&self) -> (i64, i64) {
        (self.origin, self.origin + self.len() as i64)
    }

    pub fn footprint(&self) -> StaticGraph {
        let edges = self.snapshots.iter().flatten().copied().collect();
        StaticGraph {
            nodes: self.nodes.clone(),
            edges,
        }
    }

    pub fn intersection_graph(&self) -> StaticGraph {
        let mut it = self.snapshots.iter();
        let mut acc = it.next().cloned().unwrap_or_default();
        for s in it {
            acc.retain(|e| s.contains(e));
        }
        StaticGraph {
            nodes: self.nodes.clone(),
            edges: acc,
        }
    }

    pub fn snapshot_graph(&self, i: usize) -> StaticGraph {
        StaticGraph {
            nodes: self.nodes.clone(),
            edges: self.snapshots[i].clone(),
        }
    }

    /// Slice by absolute half-open window; indices keep their absolute times.
    pub fn slice(&self, ta: i64, tb: i64) -> Result<SnapshotSequence> {
        let (lo, hi) = self.lifetime();
        let (a, b) = (ta.max(lo), tb.min(hi));
        if a >= b {
            return Err(Error::range(format!(
                "window [{ta},{tb}) does not intersect the lifetime [{lo},{hi})"
            )));
        }
        let snaps = self.snapshots[(a - lo) as usize..(b - lo) as usize].to_vec();
        SnapshotSequence::with_origin(self.nodes.clone(), snaps, a)
    }

    /// Per-edge sorted list of absolute presence times.
    pub fn presence(&self) -> BTreeMap<Edge, Vec<i64>> {
        let mut out: BTreeMap<Edge, Vec<i64>> = BTreeMap::new();
        for (i, s) in self.snapshots.iter().enumerate() {
            for &e in s {
                out.entry(e).or_default().push(self.time_of(i));
            }
        }
        out
    }

    /// Each unit step becomes a half-open interval `[t, t+1)`, consecutive
    /// steps merged; the lifetime and unit resolution are recorded so that
    /// discretizing gives back the same sequence.
    pub fn to_intervals(&self) -> IntervalGraph {
        let mut edges: BTreeMap<Edge, Vec<Interval>> = BTreeMap::new();
        for (e, times) in self.presence() {
            edges.insert(
                e,
                times
                    .into_iter()
                    .map(|t| Interval::new(Time::int(t), Time::int(t + 1)))
                    .collect(),
            );
        }
        let (lo, hi) = self.lifetime();
        let mut g = IntervalGraph::new(self.nodes.clone(), edges, Time::ZERO).expect("unit intervals are valid");
        g.lifetime = Some(Interval::new(Time::int(lo), Time::int(hi)));
        g.resolution = Some(Time::ONE);
        g
    }

    pub fn stats(&self) -> TraceStats {
        TraceStats {
            n: self.n(),
            m: self.footprint().edges.len(),
            mu: self.snapshots.iter().map(|s| s.len()).max().unwrap_or(0),
            k: self.len(),
            lifetime: (Time::int(self.origin), Time::int(self.origin + self.len() as i64 - 1)),
        }
    }
}

/// Half-open time interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
}

impl Interval {
    pub fn new(start: Time, end: Time) -> Interval {
        Interval { start, end }
    }

    pub fn contains(&self, t: Time) -> bool {
        self.start <= t && t < self.end
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let s = self.start.max(other.start);
        let e = self.end.min(other.end);
        (s < e).then_some(Interval::new(s, e))
    }
}

/// Continuous temporal graph: each edge carries sorted, disjoint half-open
/// presence intervals; crossing an edge takes the global latency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalGraph {
    pub nodes: NodeList,
    pub edges: BTreeMap<Edge, Vec<Interval>>,
    pub latency: Time,
    /// Declared lifetime; the hull of all intervals when absent.
    pub lifetime: Option<Interval>,
    /// Optional time grid: when set, every multiple of the resolution inside
    /// the lifetime counts as a characteristic date.
    pub resolution: Option<Time>,
}

impl IntervalGraph {
    /// Validates and normalizes: intervals are sorted and overlapping ones
    /// merged; empty edges dropped.
    pub fn new(
        nodes: NodeList,
        edges: BTreeMap<Edge, Vec<Interval>>,
        latency: Time,
    ) -> Result<IntervalGraph> {
        if latency.is_negative() {
            return Err(Error::input("latency must be non-negative"));
        }
        let mut norm = BTreeMap::new();
        for ((u, v), mut ivs) in edges {
            if u >= v || v >= nodes.len() {
                return Err(Error::input("edge endpoints out of range"));
            }
            if let Some(bad) = ivs.iter().find(|iv| iv.end <= iv.start) {
                return Err(Error::input(format!(
                    "empty interval [{},{}) on edge {}-{}",
                    bad.start,
                    bad.end,
                    nodes.name(u),
                    nodes.name(v)
                )));
            }
            ivs.sort();
            let mut merged: Vec<Interval> = Vec::new();
            for iv in ivs {
                match merged.last_mut() {
                    Some(last) if iv.start <= last.end => last.end = last.end.max(iv.end),
                    _ => merged.push(iv),
                }
            }
            if !merged.is_empty() {
                norm.insert((u, v), merged);
            }
        }
        Ok(IntervalGraph {
            nodes,
            edges: norm,
            latency,
            lifetime: None,
            resolution: None,
        })
    }

    pub fn from_names(
        nodes: &[&str],
        edges: &[(&str, &str, &[(Time, Time)])],
        latency: Time,
    ) -> Result<IntervalGraph> {
        let nodes = NodeList::new(nodes.iter().copied())?;
        let mut map: BTreeMap<Edge, Vec<Interval>> = BTreeMap::new();
        for (u, v, ivs) in edges {
            let e = nodes.edge_by_name(u, v)?;
            map.entry(e)
                .or_default()
                .extend(ivs.iter().map(|&(s, e)| Interval::new(s, e)));
        }
        IntervalGraph::new(nodes, map, latency)
    }

    pub fn with_lifetime(mut self, lifetime: Interval) -> IntervalGraph {
        self.lifetime = Some(lifetime);
        self
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn lifetime(&self) -> Option<Interval> {
        if self.lifetime.is_some() {
            return self.lifetime;
        }
        let s = self.edges.values().filter_map(|v| v.first()).map(|i| i.start).min()?;
        let e = self.edges.values().filter_map(|v| v.last()).map(|i| i.end).max()?;
        Some(Interval::new(s, e))
    }

    pub fn present(&self, e: Edge, t: Time) -> bool {
        self.edges
            .get(&e)
            .is_some_and(|ivs| ivs.iter().any(|iv| iv.contains(t)))
    }

    /// Sorted distinct times at which some edge appears or disappears,
    /// together with lifetime bounds and resolution grid points.
    pub fn characteristic_dates(&self) -> Vec<Time> {
        let mut dates = BTreeSet::new();
        for ivs in self.edges.values() {
            for iv in ivs {
                dates.insert(iv.start);
                dates.insert(iv.end);
            }
        }
        if let Some(life) = self.lifetime {
            dates.insert(life.start);
            dates.insert(life.end);
            dates.retain(|&d| life.start <= d && d <= life.end);
            if let Some(r) = self.resolution.filter(|r| *r > Time::ZERO) {
                let mut t = life.start;
                while t < life.end {
                    dates.insert(t);
                    t = t + r;
                }
            }
        }
        dates.into_iter().collect()
    }

    pub fn footprint(&self) -> StaticGraph {
        StaticGraph {
            nodes: self.nodes.clone(),
            edges: self.edges.keys().copied().collect(),
        }
    }

    pub fn intersection_graph(&self) -> StaticGraph {
        let edges = match self.lifetime() {
            Some(life) => self
                .edges
                .iter()
                .filter(|(_, ivs)| {
                    ivs.iter()
                        .any(|iv| iv.start <= life.start && life.end <= iv.end)
                })
                .map(|(&e, _)| e)
                .collect(),
            None => EdgeSet::new(),
        };
        StaticGraph {
            nodes: self.nodes.clone(),
            edges,
        }
    }

    pub fn snapshot_at(&self, t: Time) -> StaticGraph {
        StaticGraph {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .keys()
                .copied()
                .filter(|&e| self.present(e, t))
                .collect(),
        }
    }

    pub fn clip(&self, window: Interval) -> IntervalGraph {
        let mut edges = BTreeMap::new();
        for (&e, ivs) in &self.edges {
            let clipped: Vec<Interval> = ivs.iter().filter_map(|iv| iv.intersect(&window)).collect();
            if !clipped.is_empty() {
                edges.insert(e, clipped);
            }
        }
        let lifetime = match self.lifetime {
            Some(l) => l.intersect(&window).or(Some(window)),
            None => Some(window),
        };
        IntervalGraph {
            nodes: self.nodes.clone(),
            edges,
            latency: self.latency,
            lifetime,
            resolution: self.resolution,
        }
    }

    /// One snapshot per elementary interval between consecutive
    /// characteristic dates, with the table of elementary intervals.
    pub fn discretize(&self) -> (SnapshotSequence, Vec<Interval>) {
        let dates = self.characteristic_dates();
        let mut table = Vec::new();
        let mut snaps = Vec::new();
        for w in dates.windows(2) {
            let iv = Interval::new(w[0], w[1]);
            snaps.push(
                self.edges
                    .keys()
                    .copied()
                    .filter(|&e| self.present(e, iv.start))
                    .collect::<EdgeSet>(),
            );
            table.push(iv);
        }
        if snaps.is_empty() {
            let t0 = dates.first().copied().unwrap_or(Time::ZERO);
            snaps.push(EdgeSet::new());
            table.push(Interval::new(t0, t0 + Time::ONE));
        }
        // a unit grid keeps its integer time axis
        let origin = match (self.resolution, table[0].start.as_int()) {
            (Some(r), Some(t0)) if r == Time::ONE => t0,
            _ => 0,
        };
        let seq = SnapshotSequence {
            nodes: self.nodes.clone(),
            snapshots: snaps,
            origin,
        };
        (seq, table)
    }

    pub fn stats(&self) -> TraceStats {
        let (seq, _) = self.discretize();
        let life = self.lifetime().unwrap_or(Interval::new(Time::ZERO, Time::ZERO));
        TraceStats {
            n: self.n(),
            m: self.edges.len(),
            mu: if self.edges.is_empty() {
                0
            } else {
                seq.snapshots.iter().map(|s| s.len()).max().unwrap_or(0)
            },
            k: self.characteristic_dates().len(),
            lifetime: (life.start, life.end),
        }
    }
}

/// A temporal graph in one of its two representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemporalGraph {
    Snapshots(SnapshotSequence),
    Intervals(IntervalGraph),
}

impl From<SnapshotSequence> for TemporalGraph {
    fn from(s: SnapshotSequence) -> Self {
        TemporalGraph::Snapshots(s)
    }
}

impl From<IntervalGraph> for TemporalGraph {
    fn from(g: IntervalGraph) -> Self {
        TemporalGraph::Intervals(g)
    }
}

impl TemporalGraph {
    pub fn nodes(&self) -> &NodeList {
        match self {
            TemporalGraph::Snapshots(s) => &s.nodes,
            TemporalGraph::Intervals(g) => &g.nodes,
        }
    }

    pub fn n(&self) -> usize {
        self.nodes().len()
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, TemporalGraph::Snapshots(_))
    }

    pub fn footprint(&self) -> StaticGraph {
        match self {
            TemporalGraph::Snapshots(s) => s.footprint(),
            TemporalGraph::Intervals(g) => g.footprint(),
        }
    }

    pub fn intersection_graph(&self) -> StaticGraph {
        match self {
            TemporalGraph::Snapshots(s) => s.intersection_graph(),
            TemporalGraph::Intervals(g) => g.intersection_graph(),
        }
    }

    /// Lifetime as a half-open interval (discrete: `[origin, origin+δ)`).
    pub fn lifetime(&self) -> Option<Interval> {
        match self {
            TemporalGraph::Snapshots(s) => {
                let (a, b) = s.lifetime();
                Some(Interval::new(Time::int(a), Time::int(b)))
            }
            TemporalGraph::Intervals(g) => g.lifetime(),
        }
    }

    pub fn snapshot_at(&self, t: Time) -> Result<StaticGraph> {
        let out_of_range = || Error::range(format!("time {t} is outside the lifetime"));
        match self {
            TemporalGraph::Snapshots(s) => {
                let i = t
                    .as_int()
                    .and_then(|t| s.index_of(t))
                    .ok_or_else(out_of_range)?;
                Ok(s.snapshot_graph(i))
            }
            TemporalGraph::Intervals(g) => {
                let life = g.lifetime().ok_or_else(out_of_range)?;
                if !life.contains(t) {
                    return Err(out_of_range());
                }
                Ok(g.snapshot_at(t))
            }
        }
    }

    pub fn temporal_subgraph(&self, ta: Time, tb: Time) -> Result<TemporalGraph> {
        if ta >= tb {
            return Err(Error::range(format!("empty window [{ta},{tb})")));
        }
        match self {
            TemporalGraph::Snapshots(s) => Ok(s.slice(ta.ceil(), tb.ceil())?.into()),
            TemporalGraph::Intervals(g) => Ok(g.clip(Interval::new(ta, tb)).into()),
        }
    }

    /// The discrete form: identity on snapshot sequences, discretization on
    /// interval graphs.
    pub fn to_snapshots(&self) -> SnapshotSequence {
        match self {
            TemporalGraph::Snapshots(s) => s.clone(),
            TemporalGraph::Intervals(g) => g.discretize().0,
        }
    }

    pub fn stats(&self) -> TraceStats {
        match self {
            TemporalGraph::Snapshots(s) => s.stats(),
            TemporalGraph::Intervals(g) => g.stats(),
        }
    }
}

/// Summary counts of a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStats {
    pub n: usize,
    /// Cumulative density: edges of the footprint.
    pub m: usize,
    /// Maximum instant density.
    pub mu: usize,
    /// Snapshots (discrete) or characteristic dates (continuous).
    pub k: usize,
    pub lifetime: (Time, Time),
}
