//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{edge, EdgeSet, NodeList, SnapshotSequence, StaticGraph};

/// Node names `v00, v01, ...` so that index order matches name order.
pub fn node_names(n: usize) -> NodeList {
    NodeList::new((0..n).map(|i| format!("v{i:02}"))).expect("distinct generated names")
}

fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> EdgeSet {
    let mut out = EdgeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                out.insert((u, v));
            }
        }
    }
    out
}

/// Independent Erdős–Rényi snapshots.
pub fn random_sequence<R: Rng>(rng: &mut R, n: usize, delta: usize, p: f64) -> SnapshotSequence {
    let snaps = (0..delta).map(|_| random_edges(rng, n, p)).collect();
    SnapshotSequence::new(node_names(n), snaps).expect("generated edges are valid")
}

/// Random spanning tree plus independent extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> StaticGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = random_edges(rng, n, p);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.insert(edge(order[i], order[j]));
    }
    StaticGraph::new(node_names(n), edges).expect("generated edges are valid")
}

/// Complete multipartite graph with `k` parts of three vertices; it has
/// `3^k` maximal cliques.
pub fn moon_moser(k: usize) -> StaticGraph {
    let n = 3 * k;
    let mut edges = EdgeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            if u / 3 != v / 3 {
                edges.insert((u, v));
            }
        }
    }
    StaticGraph::new(node_names(n), edges).expect("generated edges are valid")
}
