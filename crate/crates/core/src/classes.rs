//! Class membership on finite traces, recurrent-class parameters, covering
//! verification and robust maximal independent sets.

use serde::{Deserialize, Serialize};

use crate::closure::{closure, roundtrip_closure};
use crate::error::{check_limit, Error, Result};
use crate::graph::{SnapshotSequence, StaticGraph, TemporalGraph};
use crate::hierarchy::{extremal, footprint_realization, rt_tdiameter, tdiameter, tinterval};
use crate::journey::{steady_progress_alpha, Kind};
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteClass {
    /// Some node reaches every node by journeys.
    J1A,
    /// Some node is reached by every node.
    JA1,
    /// Every node reaches every node.
    TC,
    /// Every node can reach every node and be reached back afterwards.
    TCrt,
    /// Some node shares an edge with every node.
    E1A,
    /// Every pair of nodes shares an edge at some time.
    K,
}

impl FiniteClass {
    pub const ALL: [FiniteClass; 6] = [
        FiniteClass::J1A,
        FiniteClass::JA1,
        FiniteClass::TC,
        FiniteClass::TCrt,
        FiniteClass::E1A,
        FiniteClass::K,
    ];

    pub fn depends_on_kind(&self) -> bool {
        !matches!(self, FiniteClass::E1A | FiniteClass::K)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub holds: bool,
    pub witness: Option<String>,
}

fn dominating_vertices(fp: &StaticGraph) -> Vec<usize> {
    let adj = fp.adjacency();
    let n = fp.n();
    (0..n).filter(|&v| adj[v].len() + 1 == n).collect()
}

pub fn finite_class_membership(g: &TemporalGraph, class: FiniteClass, kind: Kind) -> Membership {
    let seq = g.to_snapshots();
    membership_of(&seq, class, kind)
}

/// Membership on an already discrete trace.
pub fn membership_of(seq: &SnapshotSequence, class: FiniteClass, kind: Kind) -> Membership {
    let named = |v: Vec<usize>| Membership {
        holds: !v.is_empty(),
        witness: v.first().map(|&i| seq.nodes.name(i).to_string()),
    };
    let flag = |b: bool| Membership {
        holds: b,
        witness: None,
    };
    match class {
        FiniteClass::J1A => named(closure(seq, kind).out_dominators()),
        FiniteClass::JA1 => named(closure(seq, kind).in_dominators()),
        FiniteClass::TC => flag(closure(seq, kind).is_complete()),
        FiniteClass::TCrt => flag(
            roundtrip_closure(seq, None, kind)
                .expect("full lifetime window")
                .round_trip_complete(kind),
        ),
        FiniteClass::E1A => named(dominating_vertices(&seq.footprint())),
        FiniteClass::K => flag(seq.footprint().is_complete()),
    }
}

/// Smallest window length whose every window realizes the whole footprint.
pub fn bounded_realization_delta(seq: &SnapshotSequence) -> Option<usize> {
    extremal(seq, &footprint_realization(seq)).value
}

/// Smallest shift `p < δ` under which the sequence repeats.
pub fn smallest_period(seq: &SnapshotSequence) -> Option<usize> {
    let d = seq.len();
    (1..d).find(|&p| (0..d - p).all(|i| seq.snapshots[i] == seq.snapshots[i + p]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverVersion {
    /// Domination of the footprint.
    Temporal,
    /// A possibly different set dominating each snapshot.
    Evolving,
    /// One fixed set dominating every snapshot.
    Permanent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoverSolution {
    Fixed(Vec<String>),
    PerSnapshot(Vec<Vec<String>>),
}

/// Every node outside `set` has a neighbour in it; isolated nodes must be
/// members.
pub fn dominates(g: &StaticGraph, set: &[usize]) -> bool {
    let n = g.n();
    let mut covered = vec![false; n];
    for &s in set {
        covered[s] = true;
    }
    for &(u, v) in &g.edges {
        if set.contains(&u) {
            covered[v] = true;
        }
        if set.contains(&v) {
            covered[u] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

pub fn verify_covering(seq: &SnapshotSequence, version: CoverVersion, solution: &CoverSolution) -> Result<bool> {
    let resolve = |names: &[String]| -> Result<Vec<usize>> {
        names.iter().map(|x| seq.nodes.require(x)).collect()
    };
    match (version, solution) {
        (CoverVersion::Temporal, CoverSolution::Fixed(s)) => Ok(dominates(&seq.footprint(), &resolve(s)?)),
        (CoverVersion::Permanent, CoverSolution::Fixed(s)) => {
            let s = resolve(s)?;
            Ok((0..seq.len()).all(|i| dominates(&seq.snapshot_graph(i), &s)))
        }
        (CoverVersion::Evolving, CoverSolution::PerSnapshot(per)) => {
            if per.len() != seq.len() {
                return Err(Error::input(format!(
                    "evolving solution has {} sets for {} snapshots",
                    per.len(),
                    seq.len()
                )));
            }
            for (i, s) in per.iter().enumerate() {
                if !dominates(&seq.snapshot_graph(i), &resolve(s)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (CoverVersion::Evolving, CoverSolution::Fixed(_)) => {
            Err(Error::input("evolving covering needs one node set per snapshot"))
        }
        (_, CoverSolution::PerSnapshot(_)) => {
            Err(Error::input("temporal and permanent coverings need a single node set"))
        }
    }
}

fn is_independent(g: &StaticGraph, s: &[usize]) -> bool {
    s.iter()
        .enumerate()
        .all(|(i, &u)| s[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
}

pub fn is_mis(g: &StaticGraph, s: &[usize]) -> bool {
    is_independent(g, s) && dominates(g, s)
}

/// `S` is a maximal independent set that stays maximal in every connected
/// spanning subgraph: for each outside node, dropping its edges into `S`
/// disconnects the graph.
pub fn is_robust_mis(g: &StaticGraph, s: &[String]) -> Result<bool> {
    let idx: Vec<usize> = s.iter().map(|x| g.nodes.require(x)).collect::<Result<_>>()?;
    robust_indices(g, &idx)
}

fn robust_indices(g: &StaticGraph, s: &[usize]) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::input("robustness is defined for connected graphs"));
    }
    if !is_mis(g, s) {
        return Ok(false);
    }
    for v in (0..g.n()).filter(|v| !s.contains(v)) {
        let mut rest = g.edges.clone();
        rest.retain(|&(a, b)| !((a == v && s.contains(&b)) || (b == v && s.contains(&a))));
        let h = StaticGraph {
            nodes: g.nodes.clone(),
            edges: rest,
        };
        if h.is_connected() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub const MIS_LIMIT: usize = 20;

/// All maximal independent sets, each sorted, in lexicographic order.
pub fn maximal_independent_sets(g: &StaticGraph) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    check_limit("MIS enumeration", n, MIS_LIMIT)?;
    let mut nbr = vec![0u64; n];
    for &(u, v) in &g.edges {
        nbr[u] |= 1 << v;
        nbr[v] |= 1 << u;
    }
    // maximal cliques of the complement, with pivoting
    fn expand(r: u64, mut p: u64, mut x: u64, nbr: &[u64], full: u64, out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let comp = |v: usize| full & !nbr[v] & !(1u64 << v);
        let mut cand = p & !comp(pivot);
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            expand(r | 1 << v, p & comp(v), x & comp(v), nbr, full, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    if n > 0 {
        expand(0, full, 0, &nbr, full, &mut out);
    }
    let mut sets: Vec<Vec<usize>> = out
        .into_iter()
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    sets.sort();
    Ok(sets)
}

/// Lexicographically first robust MIS, if any (`n ≤ 20`).
pub fn find_robust_mis(g: &StaticGraph) -> Result<Option<Vec<String>>> {
    if !g.is_connected() {
        return Err(Error::input("robustness is defined for connected graphs"));
    }
    for s in maximal_independent_sets(g)? {
        if robust_indices(g, &s)? {
            return Ok(Some(s.iter().map(|&i| g.nodes.name(i).to_string()).collect()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KindFlags {
    #[serde(rename = "J1A")]
    pub j1a: bool,
    #[serde(rename = "JA1")]
    pub ja1: bool,
    #[serde(rename = "TC")]
    pub tc: bool,
    #[serde(rename = "TCrt")]
    pub tcrt: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witnesses {
    #[serde(rename = "J1A")]
    pub j1a: Option<String>,
    #[serde(rename = "JA1")]
    pub ja1: Option<String>,
    #[serde(rename = "E1A")]
    pub e1a: Option<String>,
}

/// Consolidated classification. Top-level journey flags use non-strict
/// journeys; `strict` repeats them for strict journeys. Window parameters
/// are counted in snapshots and use strict journeys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    #[serde(rename = "J1A")]
    pub j1a: bool,
    #[serde(rename = "JA1")]
    pub ja1: bool,
    #[serde(rename = "TC")]
    pub tc: bool,
    #[serde(rename = "TCrt")]
    pub tcrt: bool,
    #[serde(rename = "E1A")]
    pub e1a: bool,
    #[serde(rename = "K")]
    pub k: bool,
    pub strict: KindFlags,
    pub delta: Option<usize>,
    pub period: Option<usize>,
    pub tinterval: Option<usize>,
    pub tdiam: Option<usize>,
    pub rtdiam: Option<usize>,
    pub alpha: Option<Time>,
    pub witness: Witnesses,
}

fn kind_flags(seq: &SnapshotSequence, kind: Kind) -> (KindFlags, Witnesses) {
    let j1a = membership_of(seq, FiniteClass::J1A, kind);
    let ja1 = membership_of(seq, FiniteClass::JA1, kind);
    let flags = KindFlags {
        j1a: j1a.holds,
        ja1: ja1.holds,
        tc: membership_of(seq, FiniteClass::TC, kind).holds,
        tcrt: membership_of(seq, FiniteClass::TCrt, kind).holds,
    };
    let w = Witnesses {
        j1a: j1a.witness,
        ja1: ja1.witness,
        e1a: None,
    };
    (flags, w)
}

pub fn classify(g: &TemporalGraph) -> ClassReport {
    let seq = g.to_snapshots();
    let (ns, mut witness) = kind_flags(&seq, Kind::NonStrict);
    let (strict, _) = kind_flags(&seq, Kind::Strict);
    let e1a = membership_of(&seq, FiniteClass::E1A, Kind::Strict);
    witness.e1a = e1a.witness;
    let discrete: TemporalGraph = seq.clone().into();
    ClassReport {
        j1a: ns.j1a,
        ja1: ns.ja1,
        tc: ns.tc,
        tcrt: ns.tcrt,
        e1a: e1a.holds,
        k: membership_of(&seq, FiniteClass::K, Kind::Strict).holds,
        strict,
        delta: bounded_realization_delta(&seq),
        period: smallest_period(&seq),
        tinterval: extremal(&seq, &tinterval(&seq)).value,
        tdiam: extremal(&seq, &tdiameter(&seq, Kind::Strict)).value,
        rtdiam: extremal(&seq, &rt_tdiameter(&seq, Kind::Strict)).value,
        alpha: steady_progress_alpha(&discrete, None, Kind::Strict).expect("full lifetime"),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn bull() -> StaticGraph {
        StaticGraph::from_names(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("b", "c"), ("c", "e"), ("b", "d"), ("d", "c")],
        )
        .unwrap()
    }

    #[test]
    fn robust_mis_examples() {
        let tri = StaticGraph::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        assert!(!is_robust_mis(&tri, &names(&["a"])).unwrap());
        assert_eq!(find_robust_mis(&tri).unwrap(), None);
        assert!(is_robust_mis(&bull(), &names(&["a", "d", "e"])).unwrap());
        assert!(!is_robust_mis(&bull(), &names(&["a", "c"])).unwrap());
        assert_eq!(find_robust_mis(&bull()).unwrap(), Some(names(&["a", "d", "e"])));
        let sq = StaticGraph::from_names(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
            .unwrap();
        assert_eq!(find_robust_mis(&sq).unwrap(), Some(names(&["a", "c"])));
        assert!(is_robust_mis(&sq, &names(&["b", "d"])).unwrap());
        let split = StaticGraph::from_names(&["a", "b", "c"], &[("a", "b")]).unwrap();
        assert!(is_robust_mis(&split, &names(&["a", "c"])).is_err());
    }

    #[test]
    fn mis_enumeration() {
        let sets = maximal_independent_sets(&bull()).unwrap();
        assert_eq!(sets, vec![vec![0, 2], vec![0, 3, 4], vec![1, 4]]);
    }

    #[test]
    fn square_covering() {
        let s = SnapshotSequence::from_names(
            &["a", "b", "c", "d"],
            &[&[("b", "d"), ("c", "d")], &[("a", "d"), ("c", "d")], &[("a", "c"), ("c", "d")]],
        )
        .unwrap();
        let fixed = |v: &[&str]| CoverSolution::Fixed(names(v));
        assert!(verify_covering(&s, CoverVersion::Temporal, &fixed(&["d"])).unwrap());
        assert!(verify_covering(&s, CoverVersion::Permanent, &fixed(&["a", "b", "d"])).unwrap());
        assert!(!verify_covering(&s, CoverVersion::Permanent, &fixed(&["d"])).unwrap());
        let evolving = CoverSolution::PerSnapshot(vec![names(&["a", "b", "d"]); 3]);
        assert!(verify_covering(&s, CoverVersion::Evolving, &evolving).unwrap());
        assert!(verify_covering(&s, CoverVersion::Evolving, &fixed(&["d"])).is_err());
        let short = CoverSolution::PerSnapshot(vec![names(&["d"])]);
        assert!(verify_covering(&s, CoverVersion::Evolving, &short).is_err());
    }

    #[test]
    fn period_and_realization() {
        let s = SnapshotSequence::from_names(
            &["a", "b", "c"],
            &[&[("a", "b")], &[("b", "c")], &[("a", "b")], &[("b", "c")]],
        )
        .unwrap();
        assert_eq!(smallest_period(&s), Some(2));
        assert_eq!(bounded_realization_delta(&s), Some(2));
        let ap = SnapshotSequence::from_names(&["a", "b", "c"], &[&[("a", "b")], &[("b", "c")], &[("a", "c")]])
            .unwrap();
        assert_eq!(smallest_period(&ap), None);
        let c = SnapshotSequence::from_names(&["a", "b"], &[&[("a", "b")], &[("a", "b")]]).unwrap();
        assert_eq!(bounded_realization_delta(&c), Some(1));
        let gap = SnapshotSequence::from_names(&["a", "b"], &[&[("a", "b")], &[], &[], &[("a", "b")]]).unwrap();
        assert_eq!(bounded_realization_delta(&gap), Some(3));
    }

    #[test]
    fn complete_constant_trace() {
        let all = [("a", "b"), ("a", "c"), ("b", "c")];
        let s = SnapshotSequence::from_names(&["a", "b", "c"], &[&all, &all, &all]).unwrap();
        let r = classify(&s.into());
        assert!(r.j1a && r.ja1 && r.tc && r.tcrt && r.e1a && r.k);
        assert!(r.strict.j1a && r.strict.tc && r.strict.tcrt);
        assert_eq!((r.delta, r.tinterval, r.period), (Some(1), Some(3), Some(1)));
        assert_eq!(r.alpha, Some(Time::ZERO));
    }
}
