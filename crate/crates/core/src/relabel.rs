//! Graph-relabeling algorithms under fair adversarial schedules.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{membership_of, FiniteClass};
use crate::closure::closure;
use crate::error::{check_limit, Error, Result};
use crate::graph::{Edge, SnapshotSequence};
use crate::journey::Kind;
use crate::schedule::{check_fair, random_fair, Selections};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Broadcast,
    CountSentinel,
    CountUniform,
    /// Uniform counting where a lone counter also moves across the edge.
    CountCirculate,
}

impl Algo {
    pub fn needs_node(&self) -> bool {
        matches!(self, Algo::Broadcast | Algo::CountSentinel)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Broadcast => "broadcast",
            Algo::CountSentinel => "count-sentinel",
            Algo::CountUniform => "count-uniform",
            Algo::CountCirculate => "count-circulate",
        })
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algo> {
        match s {
            "broadcast" => Ok(Algo::Broadcast),
            "count-sentinel" => Ok(Algo::CountSentinel),
            "count-uniform" => Ok(Algo::CountUniform),
            "count-circulate" => Ok(Algo::CountCirculate),
            _ => Err(Error::input(format!("unknown relabeling algorithm {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    /// Informed.
    I,
    /// Not yet informed, or not yet counted.
    N,
    /// Counted by the sentinel.
    F,
    /// Sentinel holding its count.
    Sentinel(usize),
    /// Uniform counter; zero means eliminated.
    Count(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RelabelState {
    pub algo: Algo,
    pub labels: Vec<Label>,
}

impl RelabelState {
    pub fn init(algo: Algo, n: usize, node: Option<usize>) -> Result<RelabelState> {
        let node = match (algo.needs_node(), node) {
            (true, None) => return Err(Error::input(format!("{algo} needs an emitter or sentinel node"))),
            (_, node) => node,
        };
        let labels = (0..n)
            .map(|v| match algo {
                Algo::Broadcast if Some(v) == node => Label::I,
                Algo::Broadcast => Label::N,
                Algo::CountSentinel if Some(v) == node => Label::Sentinel(0),
                Algo::CountSentinel => Label::N,
                Algo::CountUniform | Algo::CountCirculate => Label::Count(1),
            })
            .collect();
        Ok(RelabelState { algo, labels })
    }

    /// Applies the rule on the selection `(u, v)`; `u` absorbs on a counter
    /// merge. Returns whether any label changed.
    pub fn apply(&mut self, (u, v): (usize, usize)) -> bool {
        use Label::*;
        let l = &mut self.labels;
        match (self.algo, l[u], l[v]) {
            (Algo::Broadcast, I, N) => l[v] = I,
            (Algo::Broadcast, N, I) => l[u] = I,
            (Algo::CountSentinel, Sentinel(k), N) => {
                l[u] = Sentinel(k + 1);
                l[v] = F;
            }
            (Algo::CountSentinel, N, Sentinel(k)) => {
                l[v] = Sentinel(k + 1);
                l[u] = F;
            }
            (Algo::CountUniform | Algo::CountCirculate, Count(a), Count(b)) if a > 0 && b > 0 => {
                l[u] = Count(a + b);
                l[v] = Count(0);
            }
            (Algo::CountCirculate, Count(0), Count(b)) if b > 0 => {
                l[u] = Count(b);
                l[v] = Count(0);
            }
            _ => return false,
        }
        true
    }

    pub fn informed(&self) -> BTreeSet<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == Label::I).collect()
    }

    pub fn count_sum(&self) -> usize {
        self.labels
            .iter()
            .map(|l| match l {
                Label::Count(c) => *c,
                _ => 0,
            })
            .sum()
    }

    pub fn sentinel_count(&self) -> Option<usize> {
        self.labels.iter().find_map(|l| match l {
            Label::Sentinel(k) => Some(*k),
            _ => None,
        })
    }

    pub fn check_invariants(&self) -> Result<()> {
        let ok = match self.algo {
            Algo::Broadcast => true,
            Algo::CountSentinel => {
                self.sentinel_count() == Some(self.labels.iter().filter(|l| **l == Label::F).count())
            }
            Algo::CountUniform | Algo::CountCirculate => self.count_sum() == self.labels.len(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::contract(format!("{} invariant violated: {:?}", self.algo, self.labels)))
        }
    }

    /// Whether the algorithm's goal is reached.
    pub fn succeeded(&self) -> bool {
        let n = self.labels.len();
        match self.algo {
            Algo::Broadcast => self.labels.iter().all(|l| *l == Label::I),
            Algo::CountSentinel => self.sentinel_count() == Some(n - 1),
            Algo::CountUniform | Algo::CountCirculate => self.labels.contains(&Label::Count(n)),
        }
    }
}

/// Executes a fair schedule, checking invariants after every selection.
pub fn run(seq: &SnapshotSequence, algo: Algo, node: Option<&str>, sel: &Selections) -> Result<RelabelState> {
    check_fair(seq, sel)?;
    let node = node.map(|x| seq.nodes.require(x)).transpose()?;
    let mut st = RelabelState::init(algo, seq.n(), node)?;
    for &e in sel.iter().flatten() {
        st.apply(e);
        st.check_invariants()?;
    }
    Ok(st)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelabelSummary {
    pub runs: usize,
    pub success_rate: f64,
    pub necessary: bool,
    pub sufficient: Option<bool>,
}

/// Runs `runs` random fair schedules seeded from `seed`.
pub fn run_many(seq: &SnapshotSequence, algo: Algo, node: Option<&str>, seed: u64, runs: usize) -> Result<RelabelSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = 0;
    for _ in 0..runs {
        let sel = random_fair(seq, &mut rng);
        if run(seq, algo, node, &sel)?.succeeded() {
            ok += 1;
        }
    }
    let cond = check_conditions(seq, algo, node)?;
    Ok(RelabelSummary {
        runs,
        success_rate: if runs == 0 { 0.0 } else { ok as f64 / runs as f64 },
        necessary: cond.necessary,
        sufficient: cond.sufficient,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub necessary: bool,
    /// `None` when no sufficient condition is known.
    pub sufficient: Option<bool>,
}

pub fn check_conditions(seq: &SnapshotSequence, algo: Algo, node: Option<&str>) -> Result<Conditions> {
    let node = node.map(|x| seq.nodes.require(x)).transpose()?;
    if algo.needs_node() && node.is_none() {
        return Err(Error::input(format!("{algo} needs an emitter or sentinel node")));
    }
    let reaches_all = |kind: Kind| {
        let c = closure(seq, kind);
        let u = node.expect("checked above");
        (0..seq.n()).all(|v| v == u || c.contains(u, v))
    };
    Ok(match algo {
        Algo::Broadcast => Conditions {
            necessary: reaches_all(Kind::NonStrict),
            sufficient: Some(reaches_all(Kind::Strict)),
        },
        Algo::CountSentinel => {
            let fp = seq.footprint();
            let s = node.expect("checked above");
            let star = (0..seq.n()).all(|v| v == s || fp.has_edge(s, v));
            Conditions {
                necessary: star,
                sufficient: Some(star),
            }
        }
        Algo::CountUniform => Conditions {
            necessary: membership_of(seq, FiniteClass::JA1, Kind::NonStrict).holds,
            sufficient: Some(membership_of(seq, FiniteClass::K, Kind::NonStrict).holds),
        },
        Algo::CountCirculate => Conditions {
            necessary: membership_of(seq, FiniteClass::JA1, Kind::NonStrict).holds,
            sufficient: None,
        },
    })
}

pub const EXHAUSTIVE_SNAPSHOTS: usize = 3;
pub const EXHAUSTIVE_EDGES: usize = 4;

/// Every final state reachable under some fair schedule. Within a snapshot
/// any present edge may be selected any number of times, in either
/// orientation, and the snapshot ends once each edge was selected.
pub fn reachable_final_states(seq: &SnapshotSequence, algo: Algo, node: Option<&str>) -> Result<HashSet<RelabelState>> {
    check_limit("exhaustive snapshots", seq.len(), EXHAUSTIVE_SNAPSHOTS)?;
    let widest = seq.snapshots.iter().map(|s| s.len()).max().unwrap_or(0);
    check_limit("exhaustive edges per snapshot", widest, EXHAUSTIVE_EDGES)?;
    let node = node.map(|x| seq.nodes.require(x)).transpose()?;
    let mut frontier: HashSet<RelabelState> = HashSet::from([RelabelState::init(algo, seq.n(), node)?]);
    for snap in &seq.snapshots {
        let edges: Vec<Edge> = snap.iter().copied().collect();
        let full: u32 = (1u32 << edges.len()) - 1;
        let mut seen: HashSet<(RelabelState, u32)> = frontier.iter().map(|s| (s.clone(), 0)).collect();
        let mut stack: Vec<(RelabelState, u32)> = seen.iter().cloned().collect();
        while let Some((st, mask)) = stack.pop() {
            for (i, &(a, b)) in edges.iter().enumerate() {
                for sel in [(a, b), (b, a)] {
                    let mut next = st.clone();
                    next.apply(sel);
                    next.check_invariants()?;
                    let key = (next, mask | 1 << i);
                    if seen.insert(key.clone()) {
                        stack.push(key);
                    }
                }
            }
        }
        frontier = seen.into_iter().filter(|(_, m)| *m == full).map(|(s, _)| s).collect();
    }
    Ok(frontier)
}
