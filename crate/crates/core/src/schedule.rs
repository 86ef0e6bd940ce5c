//! Fair edge-selection schedules shared by the simulators.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, SnapshotSequence};

/// Ordered selections per snapshot. The orientation of a selection is
/// meaningful to rules with an asymmetric outcome (first endpoint acts).
pub type Selections = Vec<Vec<(usize, usize)>>;

/// Schedule as read from or written to a file, by node name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub selections: Vec<Vec<(String, String)>>,
}

impl Schedule {
    pub fn from_json(text: &str) -> Result<Schedule> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn named(seq: &SnapshotSequence, sel: &Selections, seed: Option<u64>) -> Schedule {
        let name = |i: usize| seq.nodes.name(i).to_string();
        Schedule {
            seed,
            selections: sel
                .iter()
                .map(|row| row.iter().map(|&(u, v)| (name(u), name(v))).collect())
                .collect(),
        }
    }

    /// Resolves names and checks presence and fairness.
    pub fn resolve(&self, seq: &SnapshotSequence) -> Result<Selections> {
        let sel: Selections = self
            .selections
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(u, v)| Ok((seq.nodes.require(u)?, seq.nodes.require(v)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        check_fair(seq, &sel)?;
        Ok(sel)
    }
}

/// Every selection is present in its snapshot and every present edge is
/// selected at least once.
pub fn check_fair(seq: &SnapshotSequence, sel: &Selections) -> Result<()> {
    if sel.len() != seq.len() {
        return Err(Error::input(format!(
            "schedule covers {} snapshots, trace has {}",
            sel.len(),
            seq.len()
        )));
    }
    for (i, (row, snap)) in sel.iter().zip(&seq.snapshots).enumerate() {
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in row {
            let e = edge(u, v);
            if u == v || !snap.contains(&e) {
                return Err(Error::input(format!(
                    "selection {}-{} at snapshot {i} is not a present edge",
                    seq.nodes.name(u),
                    seq.nodes.name(v)
                )));
            }
            seen.insert(e);
        }
        if let Some(&(u, v)) = snap.iter().find(|e| !seen.contains(e)) {
            return Err(Error::input(format!(
                "unfair schedule: edge {}-{} never selected at snapshot {i}",
                seq.nodes.name(u),
                seq.nodes.name(v)
            )));
        }
    }
    Ok(())
}

fn orient<R: Rng>(rng: &mut R, e: Edge) -> (usize, usize) {
    if rng.gen() {
        e
    } else {
        (e.1, e.0)
    }
}

/// One random permutation of the snapshot's edges, then `extra` uniformly
/// drawn further selections, all randomly oriented.
pub fn random_round<R: Rng>(rng: &mut R, edges: &[Edge], extra: usize) -> Vec<(usize, usize)> {
    let mut row: Vec<(usize, usize)> = edges.iter().map(|&e| orient(rng, e)).collect();
    row.shuffle(rng);
    if !edges.is_empty() {
        for _ in 0..extra {
            let e = edges[rng.gen_range(0..edges.len())];
            row.push(orient(rng, e));
        }
    }
    row
}

/// Random fair schedule; each snapshot gets between `|E|` and `2|E|`
/// selections.
pub fn random_fair<R: Rng>(seq: &SnapshotSequence, rng: &mut R) -> Selections {
    seq.snapshots
        .iter()
        .map(|snap| {
            let edges: Vec<Edge> = snap.iter().copied().collect();
            let extra = rng.gen_range(0..=edges.len());
            random_round(rng, &edges, extra)
        })
        .collect()
}
