//! Analysis toolkit for temporal (time-varying) graphs: journeys, closures,
//! class membership, window hierarchies and two distributed-protocol
//! simulators.

pub mod classes;
pub mod closure;
pub mod error;
pub mod forest;
pub mod generate;
pub mod graph;
pub mod hierarchy;
pub mod io;
pub mod journey;
pub mod relabel;
pub mod schedule;
pub mod time;
pub mod windows;

pub use error::{Error, Result};
pub use graph::{
    Edge, EdgeSet, Interval, IntervalGraph, NodeId, NodeList, SnapshotSequence, StaticGraph,
    TemporalGraph, TraceStats,
};
pub use journey::{Hop, Journey, Kind};
pub use time::Time;
