//! Command-line surface for capture, snapshotting, metrics, fitting,
//! community detection and export.
//!
//! Non-capture commands are pure functions of their inputs: rerunning with
//! identical inputs yields byte-identical outputs. Outputs are written
//! atomically (temp file + rename) and every run prints a one-line JSON
//! summary, including input digests, to stdout. Exit codes: 0 success,
//! 1 usage error, 2 data error, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use txnet::distfit::{
    ccdf_series, fit_alternative, fit_log_growth, fit_power_law, gof_bootstrap, growth_series,
    Family, FitDocument, GrowthFit, GrowthPoint, XminMode,
};
use txnet::graph::{GraphError, TxGraph};
use txnet::graphml::{export_graphml_to, GraphmlError};
use txnet::ingest::{capture, replay, CaptureSummary, Edge, IngestError};
use txnet::ledger::{read_csv, write_csv_to, EdgeList, LedgerError};
use txnet::linkcomm::{community_report, detect_link_communities, CommunityError};
use txnet::metrics::{
    degree_sequence, snapshot_report, DegreeMode, DistanceMode, MetricsError, MetricsReport,
};
use txnet::synth::{generate_pa, generate_uniform, sample_power_law, GenSpec};

#[derive(Parser)]
#[command(name = "txnet", version, about = "Transaction-network capture and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capture the live unconfirmed-transaction feed into a replayable log
    Capture {
        /// WebSocket endpoint, e.g. wss://ws.blockchain.info/inv
        #[arg(long, env = "TXNET_ENDPOINT")]
        endpoint: String,
        /// Capture duration (suffixes s/m/h; bare numbers are milliseconds)
        #[arg(long)]
        duration: String,
        /// Capture log path
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a capture log into an edge CSV
    Replay {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut a time window from a capture log into an edge CSV
    Snapshot {
        #[arg(long = "in")]
        input: PathBuf,
        /// Window start as an offset from the first record (suffixes s/m/h)
        #[arg(long, default_value = "0")]
        t0: String,
        /// Window length (suffixes s/m/h)
        #[arg(long)]
        duration: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the snapshot metrics report for an edge CSV
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        direction: Direction,
        /// Snapshot label in the report (default: input file stem)
        #[arg(long)]
        label: Option<String>,
    },
    /// Extract the weak giant component into an edge CSV
    Giant {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a degree-distribution model
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CliFamily::PowerLaw)]
        family: CliFamily,
        /// Lower cutoff: an integer, or "auto" for the KS-minimizing scan
        #[arg(long, default_value = "auto")]
        xmin: String,
        /// Degree mode used for the sequence
        #[arg(long, value_enum, default_value_t = CliDegreeMode::Total)]
        mode: CliDegreeMode,
        /// Bootstrap replicates for the goodness-of-fit p-value (omit to skip)
        #[arg(long)]
        replicates: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cumulative node/edge growth series with logarithmic fits
    Growth {
        #[arg(long = "in")]
        input: PathBuf,
        /// Bin width (suffixes s/m/h), default 60 s
        #[arg(long, default_value = "60s")]
        bin: String,
        /// Output path; a .csv suffix writes the bare series
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the CCDF of the degree distribution
    Ccdf {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CliDegreeMode::Total)]
        mode: CliDegreeMode,
        /// Output path; a .csv suffix writes the bare series
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect link communities and write the community report
    Communities {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic graph or power-law sample
    Synth {
        #[arg(long, value_enum)]
        kind: CliGenKind,
        #[arg(long)]
        n: Option<u64>,
        /// Edges per new node (preferential attachment)
        #[arg(long)]
        m: Option<u64>,
        /// Edge probability (uniform random)
        #[arg(long)]
        p: Option<f64>,
        /// Tail exponent (power-law sample)
        #[arg(long)]
        alpha: Option<f64>,
        /// Lower cutoff (power-law sample)
        #[arg(long)]
        xmin: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export an edge CSV as GraphML
    ExportGraphml {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Side-by-side metrics reports (full graph and giant component) for
    /// several snapshot CSVs
    Report {
        /// Input edge CSVs, one per snapshot (repeatable)
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        direction: Direction,
    },
}

#[derive(Args)]
struct Direction {
    /// Compute distances on the directed simple projection (default)
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    /// Compute distances ignoring arc direction
    #[arg(long)]
    undirected: bool,
}

impl Direction {
    fn mode(&self) -> DistanceMode {
        if self.undirected {
            DistanceMode::Undirected
        } else {
            DistanceMode::Directed
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFamily {
    PowerLaw,
    LogNormal,
    Exponential,
    Poisson,
}

impl From<CliFamily> for Family {
    fn from(f: CliFamily) -> Family {
        match f {
            CliFamily::PowerLaw => Family::PowerLaw,
            CliFamily::LogNormal => Family::LogNormal,
            CliFamily::Exponential => Family::Exponential,
            CliFamily::Poisson => Family::Poisson,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliDegreeMode {
    In,
    Out,
    Total,
}

impl From<CliDegreeMode> for DegreeMode {
    fn from(m: CliDegreeMode) -> DegreeMode {
        match m {
            CliDegreeMode::In => DegreeMode::In,
            CliDegreeMode::Out => DegreeMode::Out,
            CliDegreeMode::Total => DegreeMode::Total,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliGenKind {
    Pa,
    Uniform,
    PowerLawSample,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> CliError {
        match e {
            LedgerError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> CliError {
        match e {
            IngestError::Io(io) => CliError::Io(io.to_string()),
            IngestError::ConnectFailed { .. } => CliError::Io(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<txnet::distfit::FitError> for CliError {
    fn from(e: txnet::distfit::FitError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<CommunityError> for CliError {
    fn from(e: CommunityError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<GraphmlError> for CliError {
    fn from(e: GraphmlError) -> CliError {
        match e {
            GraphmlError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<txnet::synth::InvalidSpec> for CliError {
    fn from(e: txnet::synth::InvalidSpec) -> CliError {
        CliError::Usage(e.to_string())
    }
}

/// The reproducibility record printed with every run.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    version: &'static str,
    argv: Vec<String>,
    inputs: Vec<InputDigest>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunSummary<T: Serialize> {
    manifest: RunManifest,
    outputs: Vec<String>,
    result: T,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print on stdout and succeed
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("txnet: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn manifest(command: &str, inputs: &[&Path], seed: Option<u64>) -> Result<RunManifest, CliError> {
    let mut digests = Vec::with_capacity(inputs.len());
    for path in inputs {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
    }
    Ok(RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        argv: std::env::args().skip(1).collect(),
        inputs: digests,
        seed,
    })
}

fn print_summary<T: Serialize>(
    manifest: RunManifest,
    outputs: &[&Path],
    result: T,
) -> Result<(), CliError> {
    let summary = RunSummary {
        manifest,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        result,
    };
    println!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(())
}

/// Writes atomically: temp file in the target directory, then rename.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// Parses `30s` / `5m` / `6h` / bare milliseconds.
fn parse_duration_ms(s: &str) -> Result<u64, CliError> {
    let bad = || CliError::Usage(format!("invalid duration {s:?} (use e.g. 30s, 5m, 6h)"));
    let (digits, scale) = match s {
        _ if s.ends_with("ms") => (&s[..s.len() - 2], 1),
        _ if s.ends_with('s') => (&s[..s.len() - 1], 1000),
        _ if s.ends_with('m') => (&s[..s.len() - 1], 60_000),
        _ if s.ends_with('h') => (&s[..s.len() - 1], 3_600_000),
        _ => (s, 1),
    };
    let value: u64 = digits.parse().map_err(|_| bad())?;
    value.checked_mul(scale).ok_or_else(bad)
}

fn label_of(path: &Path, label: Option<&str>) -> String {
    label.map(str::to_string).unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    })
}

fn load_graph(path: &Path) -> Result<(EdgeList, TxGraph), CliError> {
    let edges = read_csv(path)?;
    let graph = TxGraph::build(&edges)?;
    Ok((edges, graph))
}

fn csv_bytes(list: &EdgeList) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_csv_to(list, &mut buf)?;
    Ok(buf)
}

#[derive(Serialize)]
struct GrowthDoc {
    bin_s: u64,
    node_fit: Option<GrowthFit>,
    edge_fit: Option<GrowthFit>,
    series: Vec<GrowthPoint>,
}

#[derive(Serialize)]
struct SnapshotColumn {
    label: String,
    graph: MetricsReport,
    giant_component: MetricsReport,
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Capture { endpoint, duration, out } => {
            let duration = Duration::from_millis(parse_duration_ms(&duration)?);
            let manifest = manifest("capture", &[], None)?;
            let dir = out.parent().filter(|p| !p.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
            let mut sink = |_: &Edge| {};
            let summary = capture(&endpoint, duration, &mut tmp, &mut sink)?;
            tmp.persist(&out).map_err(|e| CliError::Io(e.to_string()))?;
            print_summary(manifest, &[&out], summary)
        }
        Command::Replay { input, out } => {
            let manifest = manifest("replay", &[&input], None)?;
            let mut edges: Vec<Edge> = Vec::new();
            let summary: CaptureSummary = replay(&input, &mut edges)?;
            let list = EdgeList::from_edges(edges)
                .map_err(|e| CliError::Data(format!("log is not time-ordered: {e}")))?;
            atomic_write(&out, &csv_bytes(&list)?)?;
            print_summary(manifest, &[&out], summary)
        }
        Command::Snapshot { input, t0, duration, out } => {
            let manifest = manifest("snapshot", &[&input], None)?;
            let t0_offset = parse_duration_ms(&t0)?;
            let duration = parse_duration_ms(&duration)?;
            let mut edges: Vec<Edge> = Vec::new();
            replay(&input, &mut edges)?;
            let list = EdgeList::from_edges(edges)
                .map_err(|e| CliError::Data(format!("log is not time-ordered: {e}")))?;
            let window = list.window(list.t0_ms() + t0_offset, duration);
            atomic_write(&out, &csv_bytes(&window)?)?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({ "records": window.len() }),
            )
        }
        Command::Metrics { input, out, direction, label } => {
            let manifest = manifest("metrics", &[&input], None)?;
            let (_, graph) = load_graph(&input)?;
            let report = snapshot_report(&graph, &label_of(&input, label.as_deref()), direction.mode())?;
            atomic_write(&out, report.to_json().as_bytes())?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({ "nodes": report.nodes, "edges": report.edges }),
            )
        }
        Command::Giant { input, out } => {
            let manifest = manifest("giant", &[&input], None)?;
            let (_, graph) = load_graph(&input)?;
            let giant = graph.giant_component()?;
            atomic_write(&out, &csv_bytes(&giant.to_edge_list())?)?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({ "nodes": giant.node_count(), "edges": giant.arc_count() }),
            )
        }
        Command::Fit { input, out, family, xmin, mode, replicates, seed } => {
            let manifest = manifest("fit", &[&input], Some(seed))?;
            let (_, graph) = load_graph(&input)?;
            let degrees = degree_sequence(&graph, mode.into());
            let family: Family = family.into();
            let fit = match (family, xmin.as_str()) {
                (Family::PowerLaw, "auto") => fit_power_law(&degrees, XminMode::Auto)?,
                (Family::PowerLaw, fixed) => {
                    let xmin = fixed
                        .parse()
                        .map_err(|_| CliError::Usage(format!("invalid xmin {fixed:?}")))?;
                    fit_power_law(&degrees, XminMode::Fixed(xmin))?
                }
                (_, "auto") => {
                    // alternatives compare against the power law's scanned tail
                    let pl = fit_power_law(&degrees, XminMode::Auto)?;
                    fit_alternative(&degrees, family, pl.xmin)?
                }
                (_, fixed) => {
                    let xmin = fixed
                        .parse()
                        .map_err(|_| CliError::Usage(format!("invalid xmin {fixed:?}")))?;
                    fit_alternative(&degrees, family, xmin)?
                }
            };
            let gof = replicates
                .map(|r| gof_bootstrap(&degrees, &fit, r, seed))
                .transpose()?;
            let doc = FitDocument { fit, gof };
            atomic_write(&out, doc.to_json().as_bytes())?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({
                    "family": doc.fit.family,
                    "xmin": doc.fit.xmin,
                    "ks_stat": doc.fit.ks_stat,
                    "p_value": doc.gof.as_ref().map(|g| g.p_value),
                }),
            )
        }
        Command::Growth { input, bin, out } => {
            let manifest = manifest("growth", &[&input], None)?;
            let bin_ms = parse_duration_ms(&bin)?;
            if bin_ms == 0 || bin_ms % 1000 != 0 {
                return Err(CliError::Usage(format!(
                    "bin must be a positive whole number of seconds, got {bin:?}"
                )));
            }
            let edges = read_csv(&input)?;
            let series = growth_series(&edges, bin_ms / 1000);
            let points: Vec<(f64, f64)> = series
                .iter()
                .map(|p| (p.t_s as f64, p.cumulative_nodes as f64))
                .collect();
            let node_fit = fit_log_growth(&points).ok();
            let points: Vec<(f64, f64)> = series
                .iter()
                .map(|p| (p.t_s as f64, p.cumulative_edges as f64))
                .collect();
            let edge_fit = fit_log_growth(&points).ok();
            let doc = GrowthDoc { bin_s: bin_ms / 1000, node_fit, edge_fit, series };
            let bytes = if out.extension().is_some_and(|e| e == "csv") {
                let mut csv = String::from("t_s,cumulative_nodes,cumulative_edges\n");
                for p in &doc.series {
                    csv.push_str(&format!("{},{},{}\n", p.t_s, p.cumulative_nodes, p.cumulative_edges));
                }
                csv.into_bytes()
            } else {
                let mut json = serde_json::to_string_pretty(&doc).expect("growth serializes");
                json.push('\n');
                json.into_bytes()
            };
            atomic_write(&out, &bytes)?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({
                    "bins": doc.series.len(),
                    "node_r_squared": doc.node_fit.map(|f| f.r_squared),
                    "edge_r_squared": doc.edge_fit.map(|f| f.r_squared),
                }),
            )
        }
        Command::Ccdf { input, mode, out } => {
            let manifest = manifest("ccdf", &[&input], None)?;
            let (_, graph) = load_graph(&input)?;
            let degrees: Vec<u64> = degree_sequence(&graph, mode.into())
                .into_iter()
                .filter(|&d| d > 0)
                .collect();
            let series = ccdf_series(&degrees)?;
            let bytes = if out.extension().is_some_and(|e| e == "csv") {
                let mut csv = String::from("degree,p_ge\n");
                for &(d, p) in &series {
                    csv.push_str(&format!("{d},{p}\n"));
                }
                csv.into_bytes()
            } else {
                let doc: Vec<serde_json::Value> = series
                    .iter()
                    .map(|&(d, p)| serde_json::json!({ "degree": d, "p_ge": p }))
                    .collect();
                let mut json =
                    serde_json::to_string_pretty(&doc).expect("ccdf serializes");
                json.push('\n');
                json.into_bytes()
            };
            atomic_write(&out, &bytes)?;
            print_summary(manifest, &[&out], serde_json::json!({ "points": series.len() }))
        }
        Command::Communities { input, out } => {
            let manifest = manifest("communities", &[&input], None)?;
            let (_, graph) = load_graph(&input)?;
            let partition = detect_link_communities(&graph)?;
            let report = community_report(&graph, &partition)?;
            atomic_write(&out, report.to_json().as_bytes())?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({
                    "communities": partition.communities.len(),
                    "partition_density": partition.partition_density,
                }),
            )
        }
        Command::Synth { kind, n, m, p, alpha, xmin, seed, out } => {
            let need = |name: &str, v: Option<u64>| {
                v.ok_or_else(|| CliError::Usage(format!("--{name} is required for this kind")))
            };
            let manifest = manifest("synth", &[], Some(seed))?;
            match kind {
                CliGenKind::Pa => {
                    let (n, m) = (need("n", n)?, need("m", m)?);
                    let graph = generate_pa(n, m, seed)?;
                    atomic_write(&out, &csv_bytes(&graph.to_edge_list())?)?;
                    print_summary(
                        manifest,
                        &[&out],
                        serde_json::json!({
                            "spec": GenSpec::PreferentialAttachment { n, m, seed },
                            "nodes": graph.node_count(),
                            "edges": graph.arc_count(),
                        }),
                    )
                }
                CliGenKind::Uniform => {
                    let n = need("n", n)?;
                    let p = p.ok_or_else(|| {
                        CliError::Usage("--p is required for this kind".into())
                    })?;
                    let graph = generate_uniform(n, p, seed)?;
                    atomic_write(&out, &csv_bytes(&graph.to_edge_list())?)?;
                    print_summary(
                        manifest,
                        &[&out],
                        serde_json::json!({
                            "spec": GenSpec::UniformRandom { n, p, seed },
                            "nodes": graph.node_count(),
                            "edges": graph.arc_count(),
                        }),
                    )
                }
                CliGenKind::PowerLawSample => {
                    let (n, xmin) = (need("n", n)?, need("xmin", xmin)?);
                    let alpha = alpha.ok_or_else(|| {
                        CliError::Usage("--alpha is required for this kind".into())
                    })?;
                    let sample = sample_power_law(alpha, xmin, n, seed)?;
                    let mut csv = String::from("value\n");
                    for x in &sample {
                        csv.push_str(&format!("{x}\n"));
                    }
                    atomic_write(&out, csv.as_bytes())?;
                    print_summary(
                        manifest,
                        &[&out],
                        serde_json::json!({
                            "spec": GenSpec::PowerLawSample { alpha, xmin, n, seed },
                            "samples": sample.len(),
                        }),
                    )
                }
            }
        }
        Command::ExportGraphml { input, out } => {
            let manifest = manifest("export-graphml", &[&input], None)?;
            let (_, graph) = load_graph(&input)?;
            let mut buf = Vec::new();
            export_graphml_to(&graph, &mut buf)?;
            atomic_write(&out, &buf)?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({ "nodes": graph.node_count(), "edges": graph.arc_count() }),
            )
        }
        Command::Report { inputs, out, direction } => {
            let paths: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
            let manifest = manifest("report", &paths, None)?;
            let mut snapshots = Vec::with_capacity(inputs.len());
            for input in &inputs {
                let (_, graph) = load_graph(input)?;
                let label = label_of(input, None);
                let giant = graph.giant_component()?;
                snapshots.push(SnapshotColumn {
                    graph: snapshot_report(&graph, &label, direction.mode())?,
                    giant_component: snapshot_report(
                        &giant,
                        &format!("{label}-giant"),
                        direction.mode(),
                    )?,
                    label,
                });
            }
            let doc = serde_json::json!({ "snapshots": snapshots });
            let mut json = serde_json::to_string_pretty(&doc).expect("report serializes");
            json.push('\n');
            atomic_write(&out, json.as_bytes())?;
            print_summary(
                manifest,
                &[&out],
                serde_json::json!({ "snapshots": inputs.len() }),
            )
        }
    }
}
