//! Spanning-forest maintenance with merging, token circulation and
//! regeneration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{components, edge, Edge, EdgeSet, SnapshotSequence, StaticGraph};
use crate::schedule::{check_fair, random_round, Selections};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// The smaller node index becomes the parent.
    #[default]
    SmallerId,
    /// A seeded coin decides the parent.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Merge,
    Circulate,
    Regenerate,
    Noop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForestState {
    pub parent: Vec<Option<usize>>,
    pub token: Vec<bool>,
}

impl ForestState {
    /// Every node is a tokened singleton.
    pub fn init(n: usize) -> ForestState {
        ForestState {
            parent: vec![None; n],
            token: vec![true; n],
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.parent[v].is_none()).collect()
    }

    pub fn tree_edges(&self) -> EdgeSet {
        (0..self.n())
            .filter_map(|v| self.parent[v].map(|p| edge(v, p)))
            .collect()
    }

    pub fn root_of(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }

    /// Applies the interaction rule on a present edge. `parent_first`
    /// decides which endpoint becomes the parent on a merge.
    pub fn select_edge(&mut self, snap: &EdgeSet, (u, v): (usize, usize), parent_first: bool) -> Result<Rule> {
        if u == v || !snap.contains(&edge(u, v)) {
            return Err(Error::contract(format!("selected edge {u}-{v} is absent")));
        }
        if self.token[u] && self.token[v] {
            let (p, c) = if parent_first { (u, v) } else { (v, u) };
            self.parent[c] = Some(p);
            self.token[c] = false;
            return Ok(Rule::Merge);
        }
        for (r, c) in [(u, v), (v, u)] {
            if self.token[r] && self.parent[c] == Some(r) {
                self.token[r] = false;
                self.token[c] = true;
                self.parent[c] = None;
                self.parent[r] = Some(c);
                return Ok(Rule::Circulate);
            }
        }
        Ok(Rule::Noop)
    }

    /// Drops tree edges missing from `next`; each orphaned child becomes a
    /// tokened root. Returns the regenerated children in order.
    pub fn advance_snapshot(&mut self, next: &EdgeSet) -> Vec<usize> {
        let lost: Vec<usize> = (0..self.n())
            .filter(|&v| self.parent[v].is_some_and(|p| !next.contains(&edge(v, p))))
            .collect();
        for &c in &lost {
            self.regenerate(c);
        }
        lost
    }

    fn regenerate(&mut self, c: usize) {
        self.parent[c] = None;
        self.token[c] = true;
    }

    pub fn check_invariants(&self, snap: &EdgeSet) -> Result<()> {
        let n = self.n();
        for v in 0..n {
            if let Some(p) = self.parent[v] {
                if !snap.contains(&edge(v, p)) {
                    return Err(Error::contract(format!("tree edge {v}-{p} is not present")));
                }
            }
            if self.token[v] != self.parent[v].is_none() {
                return Err(Error::contract(format!("node {v} violates the token-at-root rule")));
            }
            let mut x = v;
            for _ in 0..=n {
                match self.parent[x] {
                    Some(p) => x = p,
                    None => break,
                }
            }
            if self.parent[x].is_some() {
                return Err(Error::contract(format!("parent cycle through node {v}")));
            }
        }
        Ok(())
    }

    /// Tree count in each connected component of `snap`, components ordered
    /// by smallest member.
    pub fn trees_per_component(&self, snap: &EdgeSet) -> Vec<usize> {
        components(self.n(), snap)
            .iter()
            .map(|c| c.iter().filter(|&&v| self.parent[v].is_none()).count())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub t: i64,
    pub components: usize,
    pub trees: usize,
    #[serde(skip)]
    pub per_component: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForestRun {
    pub series: Vec<SeriesPoint>,
    /// Mean over snapshots of trees per component.
    pub average: f64,
    pub steps: usize,
    pub final_state: ForestState,
}

pub struct ForestSim {
    pub state: ForestState,
    tie: TieBreak,
    rng: ChaCha8Rng,
    pub steps: usize,
}

impl ForestSim {
    pub fn new(n: usize, tie: TieBreak, seed: u64) -> ForestSim {
        ForestSim {
            state: ForestState::init(n),
            tie,
            rng: ChaCha8Rng::seed_from_u64(seed),
            steps: 0,
        }
    }

    pub fn select(&mut self, snap: &EdgeSet, (u, v): (usize, usize)) -> Result<Rule> {
        let parent_first = match self.tie {
            TieBreak::SmallerId => u < v,
            TieBreak::Random => self.rng.gen(),
        };
        let rule = self.state.select_edge(snap, (u, v), parent_first)?;
        self.steps += 1;
        self.state.check_invariants(snap)?;
        Ok(rule)
    }

    pub fn advance(&mut self, next: &EdgeSet) -> Result<usize> {
        let lost: Vec<usize> = (0..self.state.n())
            .filter(|&v| self.state.parent[v].is_some_and(|p| !next.contains(&edge(v, p))))
            .collect();
        let mut current: EdgeSet = self.state.tree_edges();
        current.extend(next.iter().copied());
        for &c in &lost {
            current.remove(&edge(c, self.state.parent[c].expect("lost edge has a parent")));
            self.state.regenerate(c);
            self.steps += 1;
            self.state.check_invariants(&current)?;
        }
        self.state.check_invariants(next)?;
        Ok(lost.len())
    }
}

/// Runs the protocol over a trace with a fixed, fair schedule.
pub fn run_forest(seq: &SnapshotSequence, sel: &Selections, tie: TieBreak, seed: u64) -> Result<ForestRun> {
    check_fair(seq, sel)?;
    let mut sim = ForestSim::new(seq.n(), tie, seed);
    let empty = EdgeSet::new();
    sim.state.check_invariants(&empty)?;
    let mut series = Vec::with_capacity(seq.len());
    for (i, (snap, row)) in seq.snapshots.iter().zip(sel).enumerate() {
        sim.advance(snap)?;
        for &e in row {
            sim.select(snap, e)?;
        }
        let per_component = sim.state.trees_per_component(snap);
        series.push(SeriesPoint {
            t: seq.time_of(i),
            components: per_component.len(),
            trees: per_component.iter().sum(),
            per_component,
        });
    }
    let average = if series.is_empty() {
        0.0
    } else {
        series.iter().map(|p| p.trees as f64 / p.components as f64).sum::<f64>() / series.len() as f64
    };
    Ok(ForestRun {
        series,
        average,
        steps: sim.steps,
        final_state: sim.state,
    })
}

/// Runs with a random fair schedule drawn from `seed`.
pub fn run_forest_seeded(seq: &SnapshotSequence, tie: TieBreak, seed: u64) -> Result<(ForestRun, Selections)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sel = crate::schedule::random_fair(seq, &mut rng);
    Ok((run_forest(seq, &sel, tie, seed)?, sel))
}

/// On a static graph, selects edges in random fair rounds until each
/// component holds one tree. Returns the number of selections used, or
/// `None` if `budget` runs out first.
pub fn run_until_single_tree(g: &StaticGraph, tie: TieBreak, seed: u64, budget: usize) -> Result<Option<usize>> {
    let mut sim = ForestSim::new(g.n(), tie, seed ^ 0x5eed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Edge> = g.edges.iter().copied().collect();
    let target = components(g.n(), &g.edges).len();
    let mut used = 0;
    if sim.state.roots().len() == target {
        return Ok(Some(0));
    }
    while used < budget {
        for e in random_round(&mut rng, &edges, 0) {
            sim.select(&g.edges, e)?;
            used += 1;
            if sim.state.roots().len() == target {
                return Ok(Some(used));
            }
            if used == budget {
                break;
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(edges: &[(usize, usize)]) -> EdgeSet {
        edges.iter().map(|&(u, v)| edge(u, v)).collect()
    }

    #[test]
    fn rules() {
        let s = snap(&[(0, 1), (1, 2)]);
        let mut f = ForestState::init(3);
        assert_eq!(f.roots().len(), 3);
        f.check_invariants(&EdgeSet::new()).unwrap();
        assert_eq!(f.select_edge(&s, (0, 1), true).unwrap(), Rule::Merge);
        assert_eq!((f.parent[1], f.token[1], f.token[0]), (Some(0), false, true));
        assert_eq!(f.select_edge(&s, (1, 0), true).unwrap(), Rule::Circulate);
        assert_eq!((f.parent[0], f.parent[1], f.token[1]), (Some(1), None, true));
        f.check_invariants(&s).unwrap();
        assert!(f.select_edge(&s, (0, 2), true).unwrap_err().is_contract());
        let mut h = ForestState::init(3);
        h.parent = vec![Some(1), Some(0), None];
        h.token = vec![false, false, true];
        assert!(h.check_invariants(&s).is_err());
    }

    #[test]
    fn noop_between_tokenless() {
        let s = snap(&[(0, 1), (1, 2), (0, 2)]);
        let mut f = ForestState::init(3);
        f.select_edge(&s, (0, 1), true).unwrap();
        f.select_edge(&s, (0, 2), true).unwrap();
        assert_eq!(f.select_edge(&s, (1, 2), true).unwrap(), Rule::Noop);
    }

    #[test]
    fn regeneration() {
        let s = snap(&[(0, 1)]);
        let mut f = ForestState::init(2);
        f.select_edge(&s, (0, 1), true).unwrap();
        assert_eq!(f.advance_snapshot(&s), Vec::<usize>::new());
        assert_eq!(f.advance_snapshot(&EdgeSet::new()), vec![1]);
        assert_eq!(f, ForestState::init(2));
    }

    #[test]
    fn star_schedule_single_tree() {
        let all: Vec<(&str, &str)> = vec![("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")];
        let s = SnapshotSequence::from_names(&["a", "b", "c", "d"], &[&all]).unwrap();
        let mut row = vec![(0, 1), (0, 2), (0, 3)];
        row.extend([(1, 2), (1, 3), (2, 3)]);
        let r = run_forest(&s, &vec![row], TieBreak::SmallerId, 0).unwrap();
        assert_eq!(r.series[0].trees, 1);
        assert_eq!(r.series[0].components, 1);
    }

    #[test]
    fn disjoint_alternation_keeps_two_trees() {
        let s = SnapshotSequence::from_names(
            &["a", "b", "c", "d"],
            &[&[("a", "b")], &[("c", "d")], &[("a", "b")], &[("c", "d")]],
        )
        .unwrap();
        for seed in 0..20 {
            let (r, _) = run_forest_seeded(&s, TieBreak::Random, seed).unwrap();
            assert!(r.series.iter().all(|p| p.trees >= 2));
        }
    }

    #[test]
    fn empty_trace_stays_initial() {
        let s = SnapshotSequence::from_names(&["a", "b", "c"], &[&[], &[]]).unwrap();
        let r = run_forest(&s, &vec![vec![], vec![]], TieBreak::SmallerId, 0).unwrap();
        assert_eq!(r.final_state, ForestState::init(3));
        assert_eq!(r.average, 1.0);
    }
}
