use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};
use tvgkit::classes::{classify, find_robust_mis, is_robust_mis};
use tvgkit::closure::{closure, maximal_temporal_components, roundtrip_closure, semaphore_components};
use tvgkit::forest::{run_forest, run_forest_seeded, TieBreak};
use tvgkit::hierarchy::{
    decide, extremal, footprint_realization, rt_tdiameter, tdiameter, tinterval, Ops, WindowAlgebra,
};
use tvgkit::io::{parse_trace, to_csv, to_json};
use tvgkit::journey::{
    earliest_arrival, eccentricity, fastest_journey, foremost_tree_intervals, latest_departure_exact,
    max_disjoint_journeys, min_temporal_separator, shortest_journey, steady_progress_alpha, temporal_diameter_at,
    temporal_distance,
};
use tvgkit::relabel::{run as run_relabel, run_many, check_conditions, Algo};
use tvgkit::schedule::Schedule;
use tvgkit::windows::{sliding_metric, Metric};
use tvgkit::{Error, Kind, Result, SnapshotSequence, TemporalGraph, Time};

/// Temporal graph analysis from the command line.
#[derive(Parser, Debug)]
#[command(name = "tvgkit", version, about)]
struct Cli {
    /// Output format; each verb has its own default.
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Refuse brute-force operations on traces with more nodes than this.
    #[arg(long, global = true)]
    limit_n: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Args, Debug)]
struct Input {
    /// Trace file (JSON or link-stream CSV); standard input when absent or `-`.
    #[arg(value_name = "TRACE")]
    path: Option<PathBuf>,
    /// Same as the positional trace argument.
    #[arg(long = "input", value_name = "TRACE", conflicts_with = "path")]
    input: Option<PathBuf>,
    /// Crossing latency for interval traces.
    #[arg(long)]
    latency: Option<Time>,
}

#[derive(Args, Debug)]
struct KindArgs {
    /// Strict journeys: at most one hop per time unit (default).
    #[arg(long, conflicts_with = "non_strict")]
    strict: bool,
    /// Non-strict journeys: any number of hops per time unit.
    #[arg(long)]
    non_strict: bool,
}

impl KindArgs {
    fn kind(&self) -> Kind {
        if self.non_strict {
            Kind::NonStrict
        } else {
            Kind::Strict
        }
    }
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Node, edge, density and lifetime counts.
    Stats(Input),
    /// Rewrite a trace as snapshots or intervals, in JSON or CSV.
    Convert {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "snapshots")]
        to: Repr,
    },
    /// Transitive closure of journeys.
    Closure {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        kind: KindArgs,
        /// Round-trip closure with earliest arrival and latest departure per arc.
        #[arg(long)]
        roundtrip: bool,
        /// Snapshot window `START,END` for the round-trip closure.
        #[arg(long, value_parser = parse_int_pair, requires = "roundtrip")]
        window: Option<(i64, i64)>,
    },
    /// Class membership flags and window parameters.
    Classify(Input),
    /// Extremal window parameter with operation counts.
    Param(ParamArgs),
    /// Journey queries.
    Journey(JourneyArgs),
    /// Maximal temporal connected components.
    Components {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        kind: KindArgs,
        /// Components of the semaphore transform of the trace footprint.
        #[arg(long)]
        semaphore: bool,
    },
    /// Robust maximal independent set of the trace footprint.
    RobustMis {
        #[command(flatten)]
        input: Input,
        /// Check this comma-separated node set instead of searching.
        #[arg(long, value_delimiter = ',')]
        check: Option<Vec<String>>,
    },
    /// Protocol simulators.
    Sim {
        #[command(subcommand)]
        sim: Sim,
    },
    /// Sliding-window metric series.
    Windows {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        kind: KindArgs,
        /// tdiam, ecc(NODE) or tc-flag.
        #[arg(long)]
        metric: Metric,
        #[arg(long)]
        width: Time,
        #[arg(long, default_value = "1")]
        step: Time,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Repr {
    Snapshots,
    Intervals,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("param").required(true))]
struct ParamArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    kind: KindArgs,
    /// Largest T with every window of T snapshots sharing a connected spanning subgraph.
    #[arg(long, group = "param")]
    tinterval: bool,
    /// Smallest window length in which every footprint edge appears.
    #[arg(long, group = "param")]
    footprint_realization: bool,
    /// Smallest window length in which every node reaches every other.
    #[arg(long, group = "param")]
    tdiam: bool,
    /// Smallest window length in which every pair has a round trip.
    #[arg(long, group = "param")]
    rtdiam: bool,
    /// Decide the property for this window length instead of optimizing.
    #[arg(long, value_name = "L")]
    decide: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Query {
    Foremost,
    Shortest,
    Fastest,
    Latest,
    Distance,
    Ecc,
    Diameter,
    Alpha,
    Trees,
    Disjoint,
    Separator,
}

#[derive(Args, Debug)]
struct JourneyArgs {
    #[arg(value_enum)]
    query: Query,
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    kind: KindArgs,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// Initiation time.
    #[arg(long, default_value = "0")]
    at: Time,
    /// Time window `START,END` for fastest, alpha and trees.
    #[arg(long, value_parser = parse_time_pair)]
    window: Option<(Time, Time)>,
}

#[derive(Subcommand, Debug)]
enum Sim {
    /// Spanning-forest maintenance; emits trees and components per snapshot.
    Forest {
        #[command(flatten)]
        input: Input,
        /// Fair schedule file; a random fair schedule is drawn from the seed otherwise.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Choose the parent of a merge by coin flip instead of smaller id.
        #[arg(long)]
        random_ties: bool,
    },
    /// Graph-relabeling algorithms; emits success rate and class conditions.
    Relabel {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        algo: Algo,
        /// Emitter or sentinel node.
        #[arg(long)]
        node: Option<String>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Fair schedule file; replaces the random runs with this single schedule.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> std::result::Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or("expected START,END")?;
    let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("bad bound {x:?}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_int_pair(s: &str) -> std::result::Result<(i64, i64), String> {
    parse_pair(s)
}

fn parse_time_pair(s: &str) -> std::result::Result<(Time, Time), String> {
    parse_pair(s)
}

fn read_text(path: Option<&PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Error::input(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

impl Input {
    fn load(&self) -> Result<TemporalGraph> {
        parse_trace(&read_text(self.path.as_ref().or(self.input.as_ref()))?, self.latency)
    }

    fn load_discrete(&self) -> Result<SnapshotSequence> {
        Ok(self.load()?.to_snapshots())
    }
}

struct Ctx {
    format: Option<Format>,
    seed: u64,
    limit_n: Option<usize>,
}

impl Ctx {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::input(format!("this verb cannot emit {f:?} output").to_lowercase()))
        }
    }

    fn json_only(&self) -> Result<()> {
        self.format(Format::Json, &[Format::Json]).map(|_| ())
    }

    fn guard(&self, g: &TemporalGraph) -> Result<()> {
        match self.limit_n {
            Some(limit) if g.n() > limit => Err(Error::Limit {
                what: "trace",
                actual: g.n(),
                limit,
            }),
            _ => Ok(()),
        }
    }
}

fn json_text(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("results serialize")
}

fn param_result<A: WindowAlgebra>(seq: &SnapshotSequence, alg: &A, l: Option<usize>) -> Json {
    let (value, ops): (Json, Ops) = match l {
        Some(l) => {
            let (holds, ops) = decide(seq, alg, l);
            (json!(holds), ops)
        }
        None => {
            let r = extremal(seq, alg);
            (json!(r.value), r.ops)
        }
    };
    json!({ "value": value, "ops": ops })
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::input(format!("this query needs --{flag}")))
}

fn journey(ctx: &Ctx, a: &JourneyArgs) -> Result<Json> {
    let g = a.input.load()?;
    let kind = a.kind.kind();
    let with_metrics = |j: Option<tvgkit::Journey>| match j {
        Some(j) => json!({ "journey": j.hops, "metrics": j.metrics(&g) }),
        None => json!({ "journey": null }),
    };
    Ok(match a.query {
        Query::Foremost => {
            let table = earliest_arrival(&g, need(&a.from, "from")?, a.at, kind)?;
            match &a.to {
                Some(to) => {
                    let v = table.nodes.require(to)?;
                    let mut out = with_metrics(table.journey_to(v));
                    out["arrival"] = json!(table.arrival[v]);
                    out
                }
                None => table.to_json(),
            }
        }
        Query::Shortest => with_metrics(shortest_journey(&g, need(&a.from, "from")?, need(&a.to, "to")?, a.at, kind)?),
        Query::Fastest => with_metrics(fastest_journey(&g, need(&a.from, "from")?, need(&a.to, "to")?, a.window, kind)?),
        Query::Latest => match latest_departure_exact(&g, need(&a.from, "from")?, need(&a.to, "to")?, a.at, kind)? {
            Some(sup) => json!({ "value": sup.value, "attained": sup.attained }),
            None => json!({ "value": null }),
        },
        Query::Distance => {
            let d = temporal_distance(&g, need(&a.from, "from")?, a.at, kind)?;
            let map: serde_json::Map<String, Json> = d.into_iter().map(|(v, t)| (v.as_str().to_string(), json!(t))).collect();
            Json::Object(map)
        }
        Query::Ecc => json!({ "value": eccentricity(&g, need(&a.from, "from")?, a.at, kind)? }),
        Query::Diameter => json!({ "value": temporal_diameter_at(&g, a.at, kind) }),
        Query::Alpha => json!({ "value": steady_progress_alpha(&g, a.window, kind)? }),
        Query::Trees => {
            let range = a
                .window
                .or_else(|| g.lifetime().map(|l| (l.start, l.end)))
                .ok_or_else(|| Error::input("trees need --window on a trace without lifetime"))?;
            let parts = foremost_tree_intervals(&g, need(&a.from, "from")?, range, kind)?;
            Json::Array(
                parts
                    .into_iter()
                    .map(|(iv, parents)| json!({ "start": iv.start, "end": iv.end, "parent": parents }))
                    .collect(),
            )
        }
        Query::Disjoint => {
            ctx.guard(&g)?;
            json!({ "value": max_disjoint_journeys(&g, need(&a.from, "from")?, need(&a.to, "to")?, kind)? })
        }
        Query::Separator => {
            ctx.guard(&g)?;
            json!({ "value": min_temporal_separator(&g, need(&a.from, "from")?, need(&a.to, "to")?, kind)? })
        }
    })
}

fn load_schedule(path: &PathBuf, seq: &SnapshotSequence) -> Result<tvgkit::schedule::Selections> {
    Schedule::from_json(&read_text(Some(path))?)?.resolve(seq)
}

fn sim(ctx: &Ctx, s: &Sim) -> Result<Json> {
    ctx.json_only()?;
    match s {
        Sim::Forest {
            input,
            schedule,
            random_ties,
        } => {
            let seq = input.load_discrete()?;
            let tie = if *random_ties { TieBreak::Random } else { TieBreak::SmallerId };
            let run = match schedule {
                Some(p) => run_forest(&seq, &load_schedule(p, &seq)?, tie, ctx.seed)?,
                None => run_forest_seeded(&seq, tie, ctx.seed)?.0,
            };
            Ok(to_value(&run.series))
        }
        Sim::Relabel {
            input,
            algo,
            node,
            runs,
            schedule,
        } => {
            let seq = input.load_discrete()?;
            let node = node.as_deref();
            match schedule {
                Some(p) => {
                    let state = run_relabel(&seq, *algo, node, &load_schedule(p, &seq)?)?;
                    let cond = check_conditions(&seq, *algo, node)?;
                    Ok(json!({
                        "runs": 1,
                        "success_rate": if state.succeeded() { 1.0 } else { 0.0 },
                        "necessary": cond.necessary,
                        "sufficient": cond.sufficient,
                    }))
                }
                None => Ok(to_value(&run_many(&seq, *algo, node, ctx.seed, *runs)?)),
            }
        }
    }
}

enum Out {
    Json(Json),
    Text(String),
}

fn dispatch(cli: Cli) -> Result<Out> {
    let ctx = Ctx {
        format: cli.output,
        seed: cli.seed,
        limit_n: cli.limit_n,
    };
    match cli.verb {
        Verb::Stats(input) => {
            ctx.json_only()?;
            Ok(Out::Json(to_value(&input.load()?.stats())))
        }
        Verb::Convert { input, to } => {
            let g = input.load()?;
            let g: TemporalGraph = match to {
                Repr::Snapshots => g.to_snapshots().into(),
                Repr::Intervals => match g {
                    TemporalGraph::Snapshots(s) => s.to_intervals().into(),
                    other => other,
                },
            };
            match ctx.format(Format::Json, &[Format::Json, Format::Csv])? {
                Format::Csv => Ok(Out::Text(to_csv(&g))),
                _ => Ok(Out::Json(to_json(&g))),
            }
        }
        Verb::Closure {
            input,
            kind,
            roundtrip,
            window,
        } => {
            let seq = input.load_discrete()?;
            let format = ctx.format(Format::Json, &[Format::Json, Format::Dot])?;
            if roundtrip {
                let rt = roundtrip_closure(&seq, window, kind.kind())?;
                return Ok(match format {
                    Format::Dot => Out::Text(rt.to_dot()),
                    _ => Out::Json(rt.to_json()),
                });
            }
            let c = closure(&seq, kind.kind());
            Ok(match format {
                Format::Dot => Out::Text(c.to_dot()),
                _ => Out::Json(c.to_json()),
            })
        }
        Verb::Classify(input) => {
            ctx.json_only()?;
            Ok(Out::Json(to_value(&classify(&input.load()?))))
        }
        Verb::Param(p) => {
            ctx.json_only()?;
            let seq = p.input.load_discrete()?;
            let kind = p.kind.kind();
            let v = if p.tinterval {
                param_result(&seq, &tinterval(&seq), p.decide)
            } else if p.footprint_realization {
                param_result(&seq, &footprint_realization(&seq), p.decide)
            } else if p.tdiam {
                param_result(&seq, &tdiameter(&seq, kind), p.decide)
            } else {
                param_result(&seq, &rt_tdiameter(&seq, kind), p.decide)
            };
            Ok(Out::Json(v))
        }
        Verb::Journey(a) => {
            ctx.json_only()?;
            journey(&ctx, &a).map(Out::Json)
        }
        Verb::Components { input, kind, semaphore } => {
            ctx.json_only()?;
            let g = input.load()?;
            ctx.guard(&g)?;
            let comps = if semaphore {
                semaphore_components(&g.footprint(), kind.kind())?
            } else {
                maximal_temporal_components(&g.to_snapshots(), kind.kind())?
            };
            Ok(Out::Json(to_value(&comps)))
        }
        Verb::RobustMis { input, check } => {
            ctx.json_only()?;
            let g = input.load()?;
            ctx.guard(&g)?;
            let fp = g.footprint();
            Ok(Out::Json(match check {
                Some(set) => json!({ "robust": is_robust_mis(&fp, &set)? }),
                None => json!({ "robust_mis": find_robust_mis(&fp)? }),
            }))
        }
        Verb::Sim { sim: s } => sim(&ctx, &s).map(Out::Json),
        Verb::Windows {
            input,
            kind,
            metric,
            width,
            step,
        } => {
            let format = ctx.format(Format::Csv, &[Format::Csv, Format::Json])?;
            let series = sliding_metric(&input.load()?, &metric, width, step, kind.kind())?;
            Ok(match format {
                Format::Json => Out::Json(to_value(&series)),
                _ => Out::Text(series.to_csv()),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            let text = match out {
                Out::Json(v) => json_text(&v),
                Out::Text(s) => s,
            };
            let _ = io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_contract() { 2 } else { 1 })
        }
    }
}
