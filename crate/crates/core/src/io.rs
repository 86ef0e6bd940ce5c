//! Trace ingestion and serialization: snapshot JSON, interval JSON and
//! link-stream CSV.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    Edge, EdgeSet, Interval, IntervalGraph, NodeList, SnapshotSequence, TemporalGraph,
};
use crate::time::Time;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase", deny_unknown_fields)]
enum TraceDoc {
    Snapshots {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "is_zero")]
        origin: i64,
        snapshots: Vec<Vec<(String, String)>>,
    },
    Intervals {
        #[serde(default)]
        latency: Time,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<String>>,
        edges: Vec<EdgeDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lifetime: Option<(Time, Time)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<Time>,
    },
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    u: String,
    v: String,
    intervals: Vec<(Time, Time)>,
}

fn node_list<'a>(
    declared: Option<Vec<String>>,
    endpoints: impl Iterator<Item = &'a String>,
) -> Result<NodeList> {
    match declared {
        Some(nodes) => NodeList::new(nodes),
        None => NodeList::collect(endpoints.cloned()),
    }
}

/// Parses a JSON trace document.
pub fn parse_json(text: &str) -> Result<TemporalGraph> {
    let doc: TraceDoc = serde_json::from_str(text)?;
    match doc {
        TraceDoc::Snapshots {
            nodes,
            origin,
            snapshots,
        } => {
            let nodes = node_list(
                nodes,
                snapshots.iter().flatten().flat_map(|(u, v)| [u, v]),
            )?;
            let mut out = Vec::with_capacity(snapshots.len());
            for s in &snapshots {
                let mut set = EdgeSet::new();
                for (u, v) in s {
                    set.insert(nodes.edge_by_name(u, v)?);
                }
                out.push(set);
            }
            Ok(SnapshotSequence::with_origin(nodes, out, origin)?.into())
        }
        TraceDoc::Intervals {
            latency,
            nodes,
            edges,
            lifetime,
            resolution,
        } => {
            let nodes = node_list(nodes, edges.iter().flat_map(|e| [&e.u, &e.v]))?;
            let mut map: BTreeMap<Edge, Vec<Interval>> = BTreeMap::new();
            for e in &edges {
                let key = nodes.edge_by_name(&e.u, &e.v)?;
                map.entry(key)
                    .or_default()
                    .extend(e.intervals.iter().map(|&(s, t)| Interval::new(s, t)));
            }
            let mut g = IntervalGraph::new(nodes, map, latency)?;
            if let Some((s, e)) = lifetime {
                if s >= e {
                    return Err(Error::input("lifetime must be non-empty"));
                }
                g.lifetime = Some(Interval::new(s, e));
            }
            if let Some(r) = resolution {
                if r <= Time::ZERO {
                    return Err(Error::input("resolution must be positive"));
                }
                g.resolution = Some(r);
            }
            Ok(g.into())
        }
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    u: String,
    v: String,
    start: String,
    end: String,
}

/// Parses a link-stream CSV (`u,v,start,end`). A trace whose rows are all
/// integral unit steps is read as a snapshot sequence; anything else becomes
/// an interval graph with the given latency.
pub fn parse_csv(text: &str, latency: Time) -> Result<TemporalGraph> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.deserialize::<CsvRow>() {
        let rec = rec.map_err(|e| Error::input(format!("csv: {e}")))?;
        let s: Time = rec.start.parse()?;
        let e: Time = rec.end.parse()?;
        if e <= s {
            return Err(Error::input(format!(
                "empty interval [{s},{e}) on {}-{}",
                rec.u, rec.v
            )));
        }
        rows.push((rec.u, rec.v, s, e));
    }
    if rows.is_empty() {
        return Err(Error::input("csv trace has no rows"));
    }
    let nodes = NodeList::collect(rows.iter().flat_map(|(u, v, _, _)| [u.clone(), v.clone()]))?;
    let unit = rows
        .iter()
        .all(|(_, _, s, e)| s.is_integer() && *e == *s + Time::ONE);
    if unit && latency == Time::ZERO {
        let lo = rows.iter().map(|r| r.2.floor()).min().unwrap_or(0);
        let hi = rows.iter().map(|r| r.3.floor()).max().unwrap_or(lo + 1);
        let mut snaps = vec![EdgeSet::new(); (hi - lo) as usize];
        for (u, v, s, _) in &rows {
            snaps[(s.floor() - lo) as usize].insert(nodes.edge_by_name(u, v)?);
        }
        return Ok(SnapshotSequence::with_origin(nodes, snaps, lo)?.into());
    }
    let mut map: BTreeMap<Edge, Vec<Interval>> = BTreeMap::new();
    for (u, v, s, e) in &rows {
        map.entry(nodes.edge_by_name(u, v)?)
            .or_default()
            .push(Interval::new(*s, *e));
    }
    Ok(IntervalGraph::new(nodes, map, latency)?.into())
}

/// Parses either format, choosing by content.
pub fn parse_trace(text: &str, latency: Option<Time>) -> Result<TemporalGraph> {
    if text.trim_start().starts_with('{') {
        let mut g = parse_json(text)?;
        if let (Some(z), TemporalGraph::Intervals(ig)) = (latency, &mut g) {
            ig.latency = z;
        }
        Ok(g)
    } else {
        parse_csv(text, latency.unwrap_or(Time::ZERO))
    }
}

fn edge_names(nodes: &NodeList, e: Edge) -> (String, String) {
    (nodes.name(e.0).to_string(), nodes.name(e.1).to_string())
}

pub fn to_json(g: &TemporalGraph) -> serde_json::Value {
    let doc = match g {
        TemporalGraph::Snapshots(s) => TraceDoc::Snapshots {
            nodes: Some(s.nodes.names()),
            origin: s.origin,
            snapshots: s
                .snapshots
                .iter()
                .map(|set| set.iter().map(|&e| edge_names(&s.nodes, e)).collect())
                .collect(),
        },
        TemporalGraph::Intervals(ig) => TraceDoc::Intervals {
            latency: ig.latency,
            nodes: Some(ig.nodes.names()),
            edges: ig
                .edges
                .iter()
                .map(|(&e, ivs)| {
                    let (u, v) = edge_names(&ig.nodes, e);
                    EdgeDoc {
                        u,
                        v,
                        intervals: ivs.iter().map(|iv| (iv.start, iv.end)).collect(),
                    }
                })
                .collect(),
            lifetime: ig.lifetime.map(|l| (l.start, l.end)),
            resolution: ig.resolution,
        },
    };
    serde_json::to_value(doc).expect("trace documents serialize")
}

/// Link-stream CSV. Nodes without edges are not representable in this format.
pub fn to_csv(g: &TemporalGraph) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "v", "start", "end"]).expect("in-memory write");
    let mut rows: BTreeSet<(Time, String, String, Time)> = BTreeSet::new();
    match g {
        TemporalGraph::Snapshots(s) => {
            for (e, times) in s.presence() {
                let (u, v) = edge_names(&s.nodes, e);
                for t in times {
                    rows.insert((Time::int(t), u.clone(), v.clone(), Time::int(t + 1)));
                }
            }
        }
        TemporalGraph::Intervals(ig) => {
            for (&e, ivs) in &ig.edges {
                let (u, v) = edge_names(&ig.nodes, e);
                for iv in ivs {
                    rows.insert((iv.start, u.clone(), v.clone(), iv.end));
                }
            }
        }
    }
    for (s, u, v, e) in rows {
        w.write_record([u, v, s.to_string(), e.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_both_json_formats() {
        let s = parse_json(
            r#"{"format":"snapshots","nodes":["a","b","c"],"snapshots":[[["a","b"]],[["b","c"]]]}"#,
        )
        .unwrap();
        assert!(s.is_discrete());
        assert_eq!(s.footprint().edges.len(), 2);
        let g = parse_json(
            r#"{"format":"intervals","latency":0.5,"nodes":["a","b"],"edges":[{"u":"a","v":"b","intervals":[[0,30],[70,80]]}]}"#,
        )
        .unwrap();
        match g {
            TemporalGraph::Intervals(ig) => {
                assert_eq!(ig.latency, Time::new(1, 2));
                assert_eq!(ig.edges[&(0, 1)].len(), 2);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(parse_json(r#"{"format":"snapshots","snapshots":[[["a","a"]]]}"#).is_err());
        assert!(parse_json(r#"{"format":"snapshots","nodes":["a"],"snapshots":[[["a","b"]]]}"#).is_err());
        assert!(parse_json(r#"{"format":"other"}"#).is_err());
        assert!(parse_json(r#"{"format":"intervals","edges":[{"u":"a","v":"b","intervals":[[3,1]]}]}"#).is_err());
    }

    #[test]
    fn csv_unit_rows_become_snapshots() {
        let g = parse_csv("u,v,start,end\na,b,0,1\nb,c,2,3\n", Time::ZERO).unwrap();
        match &g {
            TemporalGraph::Snapshots(s) => {
                assert_eq!(s.len(), 3);
                assert!(s.snapshots[1].is_empty());
            }
            _ => panic!(),
        }
        let back = parse_csv(&to_csv(&g), Time::ZERO).unwrap();
        assert_eq!(back, g);
        let c = parse_csv("u,v,start,end\na,b,0,2.5\n", Time::ZERO).unwrap();
        assert!(!c.is_discrete());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"format":"intervals","latency":"1/100","nodes":["a","b","c"],"edges":[{"u":"a","v":"b","intervals":[[1,2]]}],"lifetime":[0,10]}"#;
        let g = parse_json(text).unwrap();
        let again = parse_json(&to_json(&g).to_string()).unwrap();
        assert_eq!(g, again);
    }
}
