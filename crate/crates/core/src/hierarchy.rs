//! Intersection-hierarchy framework: window algebras with a composition and
//! a test, evaluated over all windows of a sequence with a linear number of
//! operations.

use std::cell::Cell;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::closure::{component_cliques, concat_roundtrip, RoundTripClosure};
use crate::graph::{components, EdgeSet, NodeList, SnapshotSequence};
use crate::journey::Kind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Test is antitone in window length; the extremum is a maximum.
    Shrink,
    /// Test is monotone in window length; the extremum is a minimum.
    Grow,
}

pub trait WindowAlgebra {
    type Elem: Clone;

    fn lift(&self, snapshot: &EdgeSet, t: i64) -> Self::Elem;
    /// Associative composition of adjacent windows, earlier one first.
    fn compose(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn test(&self, e: &Self::Elem) -> bool;
    fn direction(&self) -> Direction;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Ops {
    pub compose: usize,
    pub test: usize,
}

impl Ops {
    pub fn total(&self) -> usize {
        self.compose + self.test
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyResult {
    pub value: Option<usize>,
    pub ops: Ops,
}

/// Counts compose and test calls on behalf of an algebra.
struct Meter<'a, A> {
    alg: &'a A,
    ops: Cell<Ops>,
}

impl<'a, A: WindowAlgebra> Meter<'a, A> {
    fn new(alg: &'a A) -> Self {
        Meter {
            alg,
            ops: Cell::new(Ops::default()),
        }
    }

    fn compose(&self, a: &A::Elem, b: &A::Elem) -> A::Elem {
        let mut o = self.ops.get();
        o.compose += 1;
        self.ops.set(o);
        self.alg.compose(a, b)
    }

    fn test(&self, e: &A::Elem) -> bool {
        let mut o = self.ops.get();
        o.test += 1;
        self.ops.set(o);
        self.alg.test(e)
    }
}

/// Queue of elements with an aggregate of its contents, kept as two stacks
/// so that push, pop-front and query cost amortized O(1) compositions.
struct TwoStack<E> {
    /// Top is the oldest element; each entry holds the aggregate from it to
    /// the end of the front part.
    front: Vec<E>,
    /// Elements in arrival order with running aggregates.
    back: Vec<(E, E)>,
}

impl<E: Clone> TwoStack<E> {
    fn new() -> Self {
        TwoStack {
            front: Vec::new(),
            back: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.front.len() + self.back.len()
    }

    fn push<A: WindowAlgebra<Elem = E>>(&mut self, m: &Meter<A>, e: E) {
        let agg = match self.back.last() {
            Some((_, prev)) => m.compose(prev, &e),
            None => e.clone(),
        };
        self.back.push((e, agg));
    }

    /// Removes the most recent push.
    fn undo_push(&mut self) {
        self.back.pop().expect("undo after push");
    }

    fn pop_front<A: WindowAlgebra<Elem = E>>(&mut self, m: &Meter<A>) {
        if self.front.is_empty() {
            let mut acc: Option<E> = None;
            while let Some((e, _)) = self.back.pop() {
                let agg = match &acc {
                    Some(later) => m.compose(&e, later),
                    None => e,
                };
                self.front.push(agg.clone());
                acc = Some(agg);
            }
        }
        self.front.pop();
    }

    fn query<A: WindowAlgebra<Elem = E>>(&self, m: &Meter<A>) -> Option<E> {
        match (self.front.last(), self.back.last()) {
            (Some(f), Some((_, b))) => Some(m.compose(f, b)),
            (Some(f), None) => Some(f.clone()),
            (None, Some((_, b))) => Some(b.clone()),
            (None, None) => None,
        }
    }
}

fn lifts<A: WindowAlgebra>(seq: &SnapshotSequence, alg: &A) -> Vec<A::Elem> {
    seq.snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| alg.lift(s, seq.time_of(i)))
        .collect()
}

/// Whether every window of length `l` passes. Windows are assembled from
/// suffix ladders of the block on their left and prefix ladders of the block
/// on their right, blocks being aligned on multiples of `l`.
pub fn decide<A: WindowAlgebra>(seq: &SnapshotSequence, alg: &A, l: usize) -> (bool, Ops) {
    let d = seq.len();
    assert!(l >= 1 && l <= d, "window length must lie in 1..=δ");
    let m = Meter::new(alg);
    let x = lifts(seq, alg);
    let mut prefix: Vec<Option<A::Elem>> = vec![None; d];
    let mut suffix: Vec<Option<A::Elem>> = vec![None; d];
    for start in (0..d).step_by(l) {
        let end = (start + l).min(d);
        let mut acc = x[start].clone();
        prefix[start] = Some(acc.clone());
        for i in start + 1..end {
            acc = m.compose(&acc, &x[i]);
            prefix[i] = Some(acc.clone());
        }
        // suffixes are only needed for starts of windows that cross into the next block
        if end < d {
            let mut acc = x[end - 1].clone();
            suffix[end - 1] = Some(acc.clone());
            for i in (start + 1..end - 1).rev() {
                acc = m.compose(&x[i], &acc);
                suffix[i] = Some(acc.clone());
            }
        }
    }
    let mut ok = true;
    for i in 0..=d - l {
        let last = i + l - 1;
        let win = if i % l == 0 {
            prefix[last].clone().expect("aligned block")
        } else {
            m.compose(
                suffix[i].as_ref().expect("suffix ladder"),
                prefix[last].as_ref().expect("prefix ladder"),
            )
        };
        if !m.test(&win) {
            ok = false;
            break;
        }
    }
    (ok, m.ops.get())
}

/// Extremal window length: the largest passing length for shrink algebras,
/// the smallest for grow algebras. Two-pointer walk over a two-stack queue.
pub fn extremal<A: WindowAlgebra>(seq: &SnapshotSequence, alg: &A) -> HierarchyResult {
    let d = seq.len();
    let m = Meter::new(alg);
    let x = lifts(seq, alg);
    let mut q: TwoStack<A::Elem> = TwoStack::new();
    let value = match alg.direction() {
        Direction::Shrink => {
            // reach[i]: end of the longest passing window starting at i
            let mut reach = vec![0usize; d];
            let mut j = 0;
            for i in 0..d {
                if j < i {
                    j = i;
                }
                while j < d {
                    q.push(&m, x[j].clone());
                    let agg = q.query(&m).expect("non-empty");
                    if m.test(&agg) {
                        j += 1;
                    } else {
                        q.undo_push();
                        break;
                    }
                }
                reach[i] = j;
                if j == d {
                    for r in reach.iter_mut().skip(i + 1) {
                        *r = d;
                    }
                    break;
                }
                if q.len() > 0 {
                    q.pop_front(&m);
                }
            }
            let mut best = None;
            let mut min_span = usize::MAX;
            let spans: Vec<usize> = (0..d)
                .map(|i| {
                    min_span = min_span.min(reach[i] - i);
                    min_span
                })
                .collect();
            for l in (1..=d).rev() {
                if spans[d - l] >= l {
                    best = Some(l);
                    break;
                }
            }
            best
        }
        Direction::Grow => {
            // need[i]: end of the shortest passing window starting at i
            let mut need: Vec<Option<usize>> = vec![None; d];
            let mut j = 0;
            let mut passing = false;
            for i in 0..d {
                while !passing && j < d {
                    q.push(&m, x[j].clone());
                    j += 1;
                    let agg = q.query(&m).expect("non-empty");
                    passing = m.test(&agg);
                }
                if !passing {
                    break;
                }
                need[i] = Some(j);
                q.pop_front(&m);
                passing = match q.query(&m) {
                    Some(agg) => m.test(&agg),
                    None => false,
                };
            }
            let mut worst = 0usize;
            let mut spans: Vec<Option<usize>> = Vec::with_capacity(d);
            for (i, n) in need.iter().enumerate() {
                let s = n.map(|e| e - i);
                worst = match s {
                    Some(s) if worst != usize::MAX => worst.max(s),
                    _ => usize::MAX,
                };
                spans.push((worst != usize::MAX).then_some(worst));
            }
            (1..=d).find(|&l| spans[d - l].is_some_and(|s| s <= l))
        }
    };
    HierarchyResult {
        value,
        ops: m.ops.get(),
    }
}

/// Decision over a growing sequence: each appended snapshot reports whether
/// the newest full window passes, at amortized O(1) operations.
pub struct StreamingDecider<'a, A: WindowAlgebra> {
    meter: Meter<'a, A>,
    queue: TwoStack<A::Elem>,
    window: usize,
    seen: usize,
    all_pass: bool,
}

impl<'a, A: WindowAlgebra> StreamingDecider<'a, A> {
    pub fn new(alg: &'a A, window: usize) -> Self {
        assert!(window >= 1);
        StreamingDecider {
            meter: Meter::new(alg),
            queue: TwoStack::new(),
            window,
            seen: 0,
            all_pass: true,
        }
    }

    /// Appends a snapshot; returns the verdict for the window ending here
    /// once at least `window` snapshots were seen.
    pub fn push(&mut self, snapshot: &EdgeSet, t: i64) -> Option<bool> {
        let e = self.meter.alg.lift(snapshot, t);
        self.queue.push(&self.meter, e);
        self.seen += 1;
        if self.queue.len() > self.window {
            self.queue.pop_front(&self.meter);
        }
        if self.seen < self.window {
            return None;
        }
        let agg = self.queue.query(&self.meter).expect("non-empty");
        let ok = self.meter.test(&agg);
        self.all_pass &= ok;
        Some(ok)
    }

    pub fn all_pass(&self) -> bool {
        self.all_pass
    }

    pub fn ops(&self) -> Ops {
        self.meter.ops.get()
    }
}

/// Stable connected spanning subgraph: intersection, spanning connectivity.
#[derive(Clone, Debug)]
pub struct TInterval {
    pub n: usize,
}

impl WindowAlgebra for TInterval {
    type Elem = EdgeSet;

    fn lift(&self, snapshot: &EdgeSet, _t: i64) -> EdgeSet {
        snapshot.clone()
    }

    fn compose(&self, a: &EdgeSet, b: &EdgeSet) -> EdgeSet {
        a.intersection(b).copied().collect()
    }

    fn test(&self, e: &EdgeSet) -> bool {
        components(self.n, e).len() <= 1
    }

    fn direction(&self) -> Direction {
        Direction::Shrink
    }
}

/// Every footprint edge appears: union, equality with the footprint.
#[derive(Clone, Debug)]
pub struct FootprintRealization {
    pub footprint: EdgeSet,
}

impl WindowAlgebra for FootprintRealization {
    type Elem = EdgeSet;

    fn lift(&self, snapshot: &EdgeSet, _t: i64) -> EdgeSet {
        snapshot.clone()
    }

    fn compose(&self, a: &EdgeSet, b: &EdgeSet) -> EdgeSet {
        a.union(b).copied().collect()
    }

    fn test(&self, e: &EdgeSet) -> bool {
        *e == self.footprint
    }

    fn direction(&self) -> Direction {
        Direction::Grow
    }
}

/// Temporal connectivity of the window: reachability relations with
/// implicit reflexivity, joined by `A ∪ B ∪ A;B`, tested for completeness.
#[derive(Clone, Debug)]
pub struct TDiameter {
    pub n: usize,
    pub kind: Kind,
}

impl WindowAlgebra for TDiameter {
    type Elem = Vec<FixedBitSet>;

    fn lift(&self, snapshot: &EdgeSet, _t: i64) -> Vec<FixedBitSet> {
        let mut rel = vec![FixedBitSet::with_capacity(self.n); self.n];
        let edges = match self.kind {
            Kind::Strict => snapshot.clone(),
            Kind::NonStrict => component_cliques(self.n, snapshot),
        };
        for (u, v) in edges {
            rel[u].insert(v);
            rel[v].insert(u);
        }
        rel
    }

    fn compose(&self, a: &Vec<FixedBitSet>, b: &Vec<FixedBitSet>) -> Vec<FixedBitSet> {
        let mut out = a.clone();
        for (u, row) in out.iter_mut().enumerate() {
            row.union_with(&b[u]);
            for w in a[u].ones() {
                row.union_with(&b[w]);
            }
            row.set(u, false);
        }
        out
    }

    fn test(&self, e: &Vec<FixedBitSet>) -> bool {
        e.iter().all(|row| row.count_ones(..) + 1 >= self.n)
    }

    fn direction(&self) -> Direction {
        Direction::Grow
    }
}

/// Round trips inside the window: round-trip closures joined by
/// concatenation.
#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub nodes: NodeList,
    pub kind: Kind,
}

impl WindowAlgebra for RoundTrip {
    type Elem = RoundTripClosure;

    fn lift(&self, snapshot: &EdgeSet, t: i64) -> RoundTripClosure {
        RoundTripClosure::lift(&self.nodes, snapshot, t, self.kind)
    }

    fn compose(&self, a: &RoundTripClosure, b: &RoundTripClosure) -> RoundTripClosure {
        concat_roundtrip(a, b).expect("adjacent windows")
    }

    fn test(&self, e: &RoundTripClosure) -> bool {
        e.round_trip_complete(self.kind)
    }

    fn direction(&self) -> Direction {
        Direction::Grow
    }
}

pub fn tinterval(seq: &SnapshotSequence) -> TInterval {
    TInterval { n: seq.n() }
}

pub fn footprint_realization(seq: &SnapshotSequence) -> FootprintRealization {
    FootprintRealization {
        footprint: seq.footprint().edges,
    }
}

pub fn tdiameter(seq: &SnapshotSequence, kind: Kind) -> TDiameter {
    TDiameter { n: seq.n(), kind }
}

pub fn rt_tdiameter(seq: &SnapshotSequence, kind: Kind) -> RoundTrip {
    RoundTrip {
        nodes: seq.nodes.clone(),
        kind,
    }
}

/// Reference evaluation composing every window from scratch.
pub fn brute_force_extremal<A: WindowAlgebra>(seq: &SnapshotSequence, alg: &A) -> Option<usize> {
    let d = seq.len();
    let x = lifts(seq, alg);
    let all_pass = |l: usize| {
        (0..=d - l).all(|i| {
            let mut acc = x[i].clone();
            for e in &x[i + 1..i + l] {
                acc = alg.compose(&acc, e);
            }
            alg.test(&acc)
        })
    };
    match alg.direction() {
        Direction::Shrink => (1..=d).rev().find(|&l| all_pass(l)),
        Direction::Grow => (1..=d).find(|&l| all_pass(l)),
    }
}
