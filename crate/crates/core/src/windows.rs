//! Sliding-window series of temporal metrics.

use std::fmt;

use serde::Serialize;

use crate::closure::closure_of;
use crate::error::{Error, Result};
use crate::graph::TemporalGraph;
use crate::journey::{eccentricity, temporal_diameter_at, Kind};
use crate::time::Time;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Metric {
    TDiam,
    Ecc(String),
    TcFlag,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::TDiam => f.write_str("tdiam"),
            Metric::Ecc(u) => write!(f, "ecc({u})"),
            Metric::TcFlag => f.write_str("tc-flag"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        match s {
            "tdiam" => Ok(Metric::TDiam),
            "tc-flag" => Ok(Metric::TcFlag),
            _ => s
                .strip_prefix("ecc(")
                .and_then(|r| r.strip_suffix(')'))
                .filter(|u| !u.is_empty())
                .map(|u| Metric::Ecc(u.to_string()))
                .ok_or_else(|| Error::input(format!("unknown metric {s:?}; expected tdiam, ecc(u) or tc-flag"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    /// A duration; `None` is unbounded.
    Duration(Option<Time>),
    Flag(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Duration(Some(t)) => write!(f, "{t}"),
            Value::Duration(None) => f.write_str("inf"),
            Value::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowSeries {
    pub metric: String,
    pub width: Time,
    pub step: Time,
    pub points: Vec<(Time, Value)>,
}

impl WindowSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("start,value\n");
        for (a, v) in &self.points {
            out.push_str(&format!("{a},{v}\n"));
        }
        out
    }
}

/// Metric of one window, evaluated on the temporal subgraph over
/// `[a, a + width)` with journeys starting at `a`.
pub fn window_value(g: &TemporalGraph, metric: &Metric, a: Time, width: Time, kind: Kind) -> Result<Value> {
    let sub = g.temporal_subgraph(a, a + width)?;
    // discrete distances count hops after the start instant
    let t = if g.is_discrete() { a - Time::ONE } else { a };
    Ok(match metric {
        Metric::TDiam => Value::Duration(temporal_diameter_at(&sub, t, kind)),
        Metric::Ecc(u) => Value::Duration(eccentricity(&sub, u, t, kind)?),
        Metric::TcFlag => Value::Flag(closure_of(&sub, kind).is_complete()),
    })
}

/// Windows start at the lifetime's start and advance by `step`; windows
/// that would overrun the lifetime are dropped.
pub fn sliding_metric(g: &TemporalGraph, metric: &Metric, width: Time, step: Time, kind: Kind) -> Result<WindowSeries> {
    let life = g
        .lifetime()
        .ok_or_else(|| Error::range("trace has no lifetime"))?;
    if width <= Time::ZERO || width > life.end - life.start {
        return Err(Error::range(format!(
            "window width {width} outside (0, {}]",
            life.end - life.start
        )));
    }
    if step <= Time::ZERO {
        return Err(Error::range(format!("window step {step} must be positive")));
    }
    if g.is_discrete() && !(width.is_integer() && step.is_integer()) {
        return Err(Error::range("discrete traces need integral width and step"));
    }
    if let Metric::Ecc(u) = metric {
        g.nodes().require(u)?;
    }
    let mut points = Vec::new();
    let mut a = life.start;
    while a + width <= life.end {
        points.push((a, window_value(g, metric, a, width, kind)?));
        a = a + step;
    }
    Ok(WindowSeries {
        metric: metric.to_string(),
        width,
        step,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SnapshotSequence;

    fn seq(snaps: &[&[(&str, &str)]]) -> TemporalGraph {
        SnapshotSequence::from_names(&["a", "b", "c"], snaps).unwrap().into()
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::TDiam, Metric::TcFlag, Metric::Ecc("a".into())] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert!("ecc()".parse::<Metric>().is_err());
    }

    #[test]
    fn constant_complete() {
        let all: &[(&str, &str)] = &[("a", "b"), ("a", "c"), ("b", "c")];
        let g = seq(&[all, all, all, all]);
        let s = sliding_metric(&g, &Metric::TcFlag, Time::int(2), Time::ONE, Kind::Strict).unwrap();
        assert_eq!(s.points.len(), 3);
        assert!(s.points.iter().all(|(_, v)| *v == Value::Flag(true)));
        let d = sliding_metric(&g, &Metric::TDiam, Time::ONE, Time::ONE, Kind::Strict).unwrap();
        assert!(d.points.iter().all(|(_, v)| *v == Value::Duration(Some(Time::ONE))));
    }

    #[test]
    fn csv_and_errors() {
        let g = seq(&[&[("a", "b")], &[("b", "c")], &[]]);
        let s = sliding_metric(&g, &Metric::Ecc("a".into()), Time::int(2), Time::ONE, Kind::Strict).unwrap();
        assert_eq!(s.to_csv(), "start,value\n0,2\n1,inf\n");
        assert!(sliding_metric(&g, &Metric::TDiam, Time::int(4), Time::ONE, Kind::Strict).is_err());
        assert!(sliding_metric(&g, &Metric::TDiam, Time::ZERO, Time::ONE, Kind::Strict).is_err());
        assert!(sliding_metric(&g, &Metric::TDiam, Time::ONE, Time::ZERO, Kind::Strict).is_err());
        assert!(sliding_metric(&g, &Metric::Ecc("z".into()), Time::ONE, Time::ONE, Kind::Strict).is_err());
    }
}
