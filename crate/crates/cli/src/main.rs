use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use circnet::metrics::{self, bisection_from_partition, BisectionConfig, MetricsRecord};
use circnet::report::{self, Category, Entry};
use circnet::routing::routes_for;
use circnet::search::{self, count_space, search_resumable, write_results, SearchConfig, SearchOutcome};
use circnet::topology::{parse_spec, Topology};
use circnet::traffic::{self, TrafficPattern};
use circnet::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "circnet", version, about = "Search and analysis of circulant interconnect topologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive search for optimal degree-k circulants on n vertices.
    Search(SearchArgs),
    /// Diameter, mean path length and bisection width of a topology.
    Metrics(MetricsArgs),
    /// Property table of several same-size topologies against a baseline.
    Compare(CompareArgs),
    /// Link loads of a traffic pattern under static shortest-path routing.
    Traffic(TrafficArgs),
    /// Routing table, or a single route.
    Route(RouteArgs),
    /// Export a topology as an edge list or JSON descriptor.
    Generate(GenerateArgs),
}

#[derive(Args, Clone)]
struct BisectionArgs {
    /// Largest n for which the bisection is computed exactly.
    #[arg(long, default_value_t = metrics::DEFAULT_EXACT_LIMIT)]
    exact_limit: usize,
    /// Random restarts of the bisection heuristic.
    #[arg(long, default_value_t = metrics::DEFAULT_RESTARTS)]
    restarts: usize,
    /// Seed for the bisection heuristic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BisectionArgs {
    fn config(&self) -> BisectionConfig {
        BisectionConfig { exact_limit: self.exact_limit, restarts: self.restarts, seed: self.seed }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Worker threads [default: available cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Search the full space even when n is a power of two.
    #[arg(long)]
    no_reduce: bool,
    #[command(flatten)]
    bisection: BisectionArgs,
    /// Results file (JSON lines); stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Checkpoint file; resumed when it already holds cursors.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Graphs between checkpoint cursors.
    #[arg(long, default_value_t = 1_000_000)]
    checkpoint_interval: u64,
    /// Stop each worker after this many graphs (needs --checkpoint).
    #[arg(long, requires = "checkpoint")]
    stop_after: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MetricsArgs {
    /// Topology spec, e.g. circulant:32:1,7 or torus:8,4.
    spec: String,
    #[command(flatten)]
    bisection: BisectionArgs,
    /// Partition file to score instead of searching: two lines of vertex ids.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Topology specs, all with the same vertex count.
    #[arg(required = true)]
    specs: Vec<String>,
    /// Baseline spec; added to the table if not listed.
    #[arg(long)]
    baseline: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    bisection: BisectionArgs,
}

#[derive(Args)]
struct TrafficArgs {
    spec: String,
    /// all2all | shift:<s> | random:<pairs>
    #[arg(long, default_value = "all2all")]
    pattern: String,
    /// Seed for random patterns.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write per-link loads as CSV.
    #[arg(long)]
    links_csv: Option<PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    spec: String,
    #[arg(long, requires = "to")]
    from: Option<usize>,
    #[arg(long, requires = "from")]
    to: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateFormat {
    Edges,
    Json,
}

#[derive(Args)]
struct GenerateArgs {
    spec: String,
    #[arg(long, value_enum, default_value = "edges")]
    format: GenerateFormat,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Failure with its process exit status.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SpecParse { .. }
            | Error::InvalidJumpSet(_)
            | Error::InvalidTopology(_)
            | Error::InvalidPartition(_)
            | Error::EndpointOutOfRange { .. }
            | Error::Report(_) => 2,
            Error::InfeasibleDegree { .. }
            | Error::Disconnected { .. }
            | Error::OddVertexCount(_)
            | Error::ExactLimitExceeded { .. }
            | Error::Overflow { .. } => 3,
            Error::Checkpoint(_) => 4,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Outcome = Result<(), Failure>;

fn output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &Value) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| Failure { code: 1, msg: e.to_string() })?;
    writeln!(out)?;
    Ok(())
}

fn provenance(command: &str, config: Value) -> Value {
    json!({ "tool": "circnet", "version": env!("CARGO_PKG_VERSION"), "command": command, "config": config })
}

fn cmd_search(a: SearchArgs) -> Outcome {
    let cfg = SearchConfig {
        workers: a.workers.unwrap_or_else(|| SearchConfig::default().workers).max(1),
        reduced: !a.no_reduce,
        bisection: a.bisection.config(),
        checkpoint_interval: a.checkpoint_interval.max(1),
    };
    let total = count_space(a.n, a.k, cfg.reduced)?;
    let header = provenance(
        "search",
        json!({ "n": a.n, "k": a.k, "workers": cfg.workers, "reduced": cfg.reduced,
                "exact_bisection_limit": cfg.bisection.exact_limit, "restarts": cfg.bisection.restarts,
                "seed": cfg.bisection.seed, "space": total.to_string() }),
    );
    let started = Instant::now();
    let records = match &a.checkpoint {
        Some(path) => match search_resumable(a.n, a.k, &cfg, path, a.stop_after)? {
            SearchOutcome::Complete(r) => r,
            SearchOutcome::Interrupted { scanned, remaining } => {
                let secs = started.elapsed().as_secs_f64();
                eprintln!(
                    "{}",
                    json!({ "status": "interrupted", "scanned": scanned, "remaining": remaining.to_string(),
                            "checkpoint": path, "timing": { "elapsed_s": secs } })
                );
                return Ok(());
            }
        },
        None => search::search_optimal(a.n, a.k, &cfg)?,
    };
    let secs = started.elapsed().as_secs_f64();
    let mut out = output(a.out.as_ref())?;
    serde_json::to_writer(&mut out, &header).map_err(Error::from)?;
    writeln!(out)?;
    write_results(&records, &mut out)?;
    out.flush()?;
    let rate = if secs > 0.0 { total as f64 / secs / cfg.workers as f64 } else { f64::INFINITY };
    eprintln!(
        "{}",
        json!({ "status": "complete", "optima": records.len(), "space": total.to_string(),
                "timing": { "elapsed_s": secs, "graphs_per_s_per_core": rate } })
    );
    Ok(())
}

fn metrics_of(t: &Topology, b: &BisectionArgs) -> Result<MetricsRecord, Error> {
    metrics::analyze(t, &b.config())
}

fn cmd_metrics(a: MetricsArgs) -> Outcome {
    let t = parse_spec(&a.spec)?;
    let record = match &a.partition {
        Some(p) => {
            let b = bisection_from_partition(&t, &std::fs::read_to_string(p)?)?;
            MetricsRecord::from_parts(&t, metrics::diameter_mpl(&t)?, Some(&b))
        }
        None => metrics_of(&t, &a.bisection)?,
    };
    let b = &a.bisection;
    print_json(&json!({
        "provenance": provenance("metrics", json!({ "spec": a.spec, "exact_bisection_limit": b.exact_limit,
            "restarts": b.restarts, "seed": b.seed, "partition": a.partition })),
        "topology": t.descriptor(),
        "label": t.label(),
        "metrics": record,
        "mpl_2dp": format!("{:.2}", record.mpl_f64()),
        "bisection_kind": match (record.bisection, record.bisection_exact) {
            (None, _) => "none",
            (Some(_), true) => "exact",
            (Some(_), false) => "upper-bound",
        },
    }))
}

fn cmd_compare(a: CompareArgs) -> Outcome {
    let base = parse_spec(&a.baseline)?;
    let base_label = base.label();
    let mut specs = a.specs.clone();
    if !specs.iter().any(|s| parse_spec(s).map(|t| t.label() == base_label).unwrap_or(false)) {
        specs.insert(0, a.baseline.clone());
    }
    let topologies: Vec<Topology> = specs.iter().map(|s| parse_spec(s)).collect::<Result<_, _>>()?;
    if let Some(t) = topologies.iter().find(|t| t.n() != base.n()) {
        return Err(usage(format!("{} has {} vertices, baseline has {}", t.label(), t.n(), base.n())));
    }
    let entries = topologies
        .iter()
        .map(|t| {
            let r = metrics_of(t, &a.bisection)?;
            Ok(Entry::from_record(t.label(), Category::of(t, base.max_degree()), &r))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rows = report::build_table(&entries, &base_label)?;
    let b = &a.bisection;
    let config = json!({ "specs": specs, "baseline": a.baseline, "exact_bisection_limit": b.exact_limit,
                         "restarts": b.restarts, "seed": b.seed });
    match a.format {
        Format::Json => print_json(&json!({ "provenance": provenance("compare", config), "rows": report::to_json(&rows) })),
        Format::Csv => {
            // CSV stays a bare table; provenance goes to stderr
            eprintln!("{}", provenance("compare", config));
            let mut out = io::stdout().lock();
            report::write_csv(&rows, &mut out)?;
            Ok(())
        }
    }
}

fn parse_pattern(s: &str, n: usize, seed: u64) -> Result<TrafficPattern, Failure> {
    let num = |v: &str| v.parse::<usize>().map_err(|_| usage(format!("bad number in pattern {s:?}")));
    match s.split_once(':') {
        None if s == "all2all" => Ok(traffic::pattern_all_to_all(n)),
        Some(("shift", v)) => Ok(traffic::pattern_ring_shift(n, num(v)?).map_err(|e| usage(e.to_string()))?),
        Some(("random", v)) => Ok(traffic::pattern_random_pairs(n, num(v)?, seed).map_err(|e| usage(e.to_string()))?),
        _ => Err(usage(format!("unknown pattern {s:?}; expected all2all, shift:<s> or random:<pairs>"))),
    }
}

fn cmd_traffic(a: TrafficArgs) -> Outcome {
    let t = parse_spec(&a.spec)?;
    let p = parse_pattern(&a.pattern, t.n(), a.seed)?;
    let table = routes_for(&t)?;
    let r = traffic::evaluate(&t, &table, &p)?;
    if let Some(path) = &a.links_csv {
        let mut w = BufWriter::new(File::create(path)?);
        r.write_csv(&mut w)?;
        w.flush()?;
    }
    print_json(&json!({
        "provenance": provenance("traffic", json!({ "spec": a.spec, "pattern": a.pattern, "seed": a.seed })),
        "label": t.label(),
        "scheme": table.scheme(),
        "report": r,
    }))
}

fn cmd_route(a: RouteArgs) -> Outcome {
    let t = parse_spec(&a.spec)?;
    let table = routes_for(&t)?;
    match (a.from, a.to) {
        (Some(s), Some(d)) => {
            for v in [s, d] {
                if v >= t.n() {
                    return Err(Error::EndpointOutOfRange { vertex: v, n: t.n() }.into());
                }
            }
            let path = table.path(s, d);
            print_json(&json!({ "scheme": table.scheme(), "from": s, "to": d, "hops": path.len() - 1, "path": path }))
        }
        _ => {
            let mut out = BufWriter::new(io::stdout().lock());
            serde_json::to_writer(&mut out, &table.to_json()).map_err(Error::from)?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    let t = parse_spec(&a.spec)?;
    let mut out = output(a.out.as_ref())?;
    match a.format {
        GenerateFormat::Edges => t.write_edge_list(&mut out)?,
        GenerateFormat::Json => {
            serde_json::to_writer(&mut out, &t.descriptor()).map_err(Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search(a) => cmd_search(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Traffic(a) => cmd_traffic(a),
        Command::Route(a) => cmd_route(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
