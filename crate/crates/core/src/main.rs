use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use spanlab::certify::{certify, CertConfig, CertReport};
use spanlab::harness::{generate, grid, growth_ratios, run_sweep, GenKind, GenSpec, Growth, SweepOptions};
use spanlab::metric::io::{fmt_weight, parse_matrix};
use spanlab::metric::{metric_graph, Edge, MetricSpace, Norm, WeightedGraph};
use spanlab::spanner::{
    check_mst_containment, greedy_spanner_metric, spanner_metrics_with, verify_stretch_with, write_spanner, MstCheck,
    Spanner, SpannerFile, SpannerMetrics, StretchReport,
};

const EXIT_VERIFY: u8 = 1;
const EXIT_ANOMALY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const LARGE_N: usize = 4096;

#[derive(Parser)]
#[command(name = "spanlab", version, about = "Greedy metric spanners: build, verify, certify, sweep")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the greedy spanner of an instance and print its metrics as JSON.
    Build(BuildArgs),
    /// Check stretch and MST containment of a spanner file. Exits 1 on failure.
    Verify(VerifyArgs),
    /// Run the cluster certifier and print its report as JSON. Exits 2 on
    /// anomalies, or on fallback levels unless --allow-fallback is given.
    Certify(CertifyArgs),
    /// Run a generator x n x dim x eps x seed grid.
    ///
    /// CSV columns, in order: generator, n, dim, eps, seed, lightness,
    /// sparsity, max_stretch, build_ms, certified, min_c. One row per grid
    /// cell in grid order; min_c is empty when not computed. Columns are
    /// comma separated with a header line, so gnuplot reads them with
    /// `set datafile separator ","` and `using 2:6` for lightness against n.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct Source {
    /// Point file (one point per line). Overrides --gen.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Read --input as a distance matrix (`n` then n rows) instead of points.
    #[arg(long, requires = "input")]
    matrix: bool,
    #[arg(long, value_enum, default_value_t = GenKind::UniformCube)]
    gen: GenKind,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, env = "SPANLAB_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Edges,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    eps: f64,
    /// Spanner output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Edges)]
    format: Format,
    /// Metrics JSON destination; stdout when unset.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Allow n above 4096 (the edge stream is quadratic).
    #[arg(long)]
    force: bool,
    /// Report build_ms as 0 so outputs are byte-identical across runs.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Spanner file written by `build` (edges, json or csv).
    #[arg(long)]
    spanner: PathBuf,
    /// Stretch parameter, needed only for csv spanner files.
    #[arg(long)]
    eps: Option<f64>,
    /// Report destination; stdout when unset.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: Source,
    /// Required unless --spanner is given.
    #[arg(long)]
    eps: Option<f64>,
    /// Certify this spanner instead of building one.
    #[arg(long)]
    spanner: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat ledger fallback as a warning instead of a failure.
    #[arg(long)]
    allow_fallback: bool,
    /// Include per-cluster dumps in the report.
    #[arg(long)]
    dump_clusters: bool,
    /// Diameter constant g.
    #[arg(long, default_value_t = 33.0)]
    g: f64,
    /// Analysis eps; defaults to eps / 400.
    #[arg(long)]
    eps_analysis: Option<f64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "uniform-cube")]
    gen: Vec<GenKind>,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    dim: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    eps: Vec<f64>,
    /// First seed; cells use seed, seed+1, ... seed+reps-1.
    #[arg(long, env = "SPANLAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: u64,
    /// CSV destination; stdout when unset. Rows are flushed as they finish.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Growth-ratio summary (JSON) destination; stderr when unset.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also run the certifier on every cell.
    #[arg(long)]
    certify: bool,
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    force: bool,
}

struct Loaded {
    metric: MetricSpace,
    graph: Arc<WeightedGraph>,
    label: String,
}

/// Meaning "bad invocation" rather than "bad data".
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

fn load(src: &Source) -> Result<Loaded> {
    let metric = match (&src.input, src.matrix) {
        (Some(path), true) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_matrix(&text)?
        }
        (Some(path), false) => {
            let spec = GenSpec {
                path: Some(path.clone()),
                ..GenSpec::new(GenKind::ExplicitFile, 0, 0, 0)
            };
            MetricSpace::from_points(generate(&spec)?, Norm::L2)
        }
        (None, _) => {
            if src.gen == GenKind::ExplicitFile {
                return usage("--gen explicit-file needs --input");
            }
            match generate(&GenSpec::new(src.gen, src.n, src.dim, src.seed)) {
                Ok(p) => MetricSpace::from_points(p, Norm::L2),
                Err(e) => return usage(e.to_string()),
            }
        }
    };
    let label = match &src.input {
        Some(p) => p.display().to_string(),
        None => src.gen.name().to_string(),
    };
    let graph = Arc::new(metric_graph(&metric)?);
    Ok(Loaded { metric, graph, label })
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout()),
    })
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SpannerJson {
    schema: u32,
    n: usize,
    eps: f64,
    edges: Vec<Edge>,
}

fn render_spanner(s: &Spanner, format: Format) -> Result<String> {
    Ok(match format {
        Format::Edges => write_spanner(s),
        Format::Json => {
            let doc = SpannerJson {
                schema: 1,
                n: s.n(),
                eps: s.eps(),
                edges: s.edges().to_vec(),
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => {
            let mut out = String::from("u,v,w\n");
            for e in s.edges() {
                out += &format!("{},{},{}\n", e.u, e.v, fmt_weight(e.w));
            }
            out
        }
    })
}

/// Reads any format `build` writes. CSV files carry no eps, so it must
/// come from the command line.
fn read_spanner(path: &Path, base: Arc<WeightedGraph>, eps: Option<f64>) -> Result<Spanner> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trimmed = text.trim_start();
    let file = if trimmed.starts_with('{') {
        let doc: SpannerJson = serde_json::from_str(&text)?;
        SpannerFile {
            n: doc.n,
            declared: doc.edges.len(),
            eps: doc.eps,
            edges: doc.edges,
        }
    } else if trimmed.starts_with("u,v,w") {
        let Some(eps) = eps else {
            return usage("csv spanner files need --eps");
        };
        let mut edges = Vec::new();
        for rec in csv::Reader::from_reader(text.as_bytes()).deserialize::<(usize, usize, f64)>() {
            let (u, v, w) = rec?;
            edges.push(Edge::new(u, v, w));
        }
        SpannerFile {
            n: base.n(),
            declared: edges.len(),
            eps,
            edges,
        }
    } else {
        SpannerFile::parse(&text)?
    };
    if file.edges.len() != file.declared {
        eprintln!(
            "warning: {} declares {} edges but lists {}",
            path.display(),
            file.declared,
            file.edges.len()
        );
    }
    Ok(file.into_spanner(base)?)
}

#[derive(Serialize)]
struct BuildReport {
    schema: u32,
    source: String,
    n: usize,
    dim: Option<usize>,
    seed: Option<u64>,
    eps: f64,
    metrics: SpannerMetrics,
    mst_contained: bool,
    build_ms: u64,
}

fn cmd_build(a: &BuildArgs) -> Result<u8> {
    let n = match &a.source.input {
        Some(_) => None,
        None => Some(a.source.n),
    };
    if n.is_some_and(|n| n > LARGE_N) && !a.force {
        eprintln!("warning: n = {} exceeds {LARGE_N}; the greedy pass is quadratic in n", a.source.n);
        return usage("pass --force to build anyway");
    }
    let inst = load(&a.source)?;
    if inst.metric.len() > LARGE_N && !a.force {
        eprintln!("warning: n = {} exceeds {LARGE_N}; the greedy pass is quadratic in n", inst.metric.len());
        return usage("pass --force to build anyway");
    }
    let start = Instant::now();
    let s = greedy_spanner_metric(&inst.metric, inst.graph.clone(), a.eps)?;
    let build_ms = if a.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let metrics = spanner_metrics_with(&s, &inst.metric)?;
    let mst = check_mst_containment(&s)?;
    if let Some(path) = &a.out {
        std::fs::write(path, render_spanner(&s, a.format)?).with_context(|| format!("writing {}", path.display()))?;
    } else if a.metrics.is_some() {
        print!("{}", render_spanner(&s, a.format)?);
    }
    let report = BuildReport {
        schema: 1,
        source: inst.label,
        n: s.n(),
        dim: inst.metric.points().map(|p| p.dim()),
        seed: a.source.input.is_none().then_some(a.source.seed),
        eps: a.eps,
        metrics,
        mst_contained: mst.holds(1e-9),
        build_ms,
    };
    emit_json(&report, a.metrics.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReport {
    schema: u32,
    ok: bool,
    stretch_ok: bool,
    mst_ok: bool,
    metrics: SpannerMetrics,
    stretch: StretchReport,
    mst: MstCheck,
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let inst = load(&a.source)?;
    let s = read_spanner(&a.spanner, inst.graph.clone(), a.eps)?;
    let stretch = verify_stretch_with(&s, &inst.metric);
    let metrics = spanner_metrics_with(&s, &inst.metric)?;
    let mst = check_mst_containment(&s)?;
    let stretch_ok = stretch.within(s.eps());
    let mst_ok = mst.holds(1e-9);
    if !stretch_ok {
        if let Some((x, y)) = stretch.worst_pair {
            eprintln!("stretch {} > {} at pair ({x}, {y})", stretch.max_stretch, 1.0 + s.eps());
        }
    }
    if !mst_ok {
        eprintln!("{} MST edges missing from the spanner", mst.missing.len());
    }
    let report = VerifyReport {
        schema: 1,
        ok: stretch_ok && mst_ok,
        stretch_ok,
        mst_ok,
        metrics,
        stretch,
        mst,
    };
    emit_json(&report, a.out.as_deref())?;
    Ok(if report.ok { 0 } else { EXIT_VERIFY })
}

fn cmd_certify(a: &CertifyArgs) -> Result<u8> {
    let inst = load(&a.source)?;
    let s = match (&a.spanner, a.eps) {
        (Some(path), eps) => read_spanner(path, inst.graph.clone(), eps)?,
        (None, Some(eps)) => greedy_spanner_metric(&inst.metric, inst.graph.clone(), eps)?,
        (None, None) => return usage("certify needs --eps or --spanner"),
    };
    let config = CertConfig {
        g: a.g,
        eps_analysis: a.eps_analysis,
        dump_clusters: a.dump_clusters,
        ..CertConfig::default()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs.max(1)).build()?;
    let report: CertReport = pool.install(|| certify(&s, &inst.metric, &config))?;
    emit_json(&report, a.out.as_deref())?;
    for an in &report.anomalies {
        eprintln!("anomaly: stream {} level {} {}: {}", an.j, an.level, an.kind, an.detail);
    }
    if !report.fallbacks.is_empty() {
        let tag = if a.allow_fallback { "warning" } else { "error" };
        eprintln!("{tag}: {} clusters fell back to pooled credit", report.fallbacks.len());
    }
    if report.min_feasible_c.is_none() {
        eprintln!("no feasible credit constant found");
    }
    let failed = !report.certified() || (!report.fallbacks.is_empty() && !a.allow_fallback);
    Ok(if failed { EXIT_ANOMALY } else { 0 })
}

#[derive(Serialize)]
struct SweepSummary {
    schema: u32,
    cells: usize,
    growth: Vec<Growth>,
}

fn cmd_sweep(a: &SweepArgs) -> Result<u8> {
    if a.gen.contains(&GenKind::ExplicitFile) {
        return usage("sweep cannot use explicit-file");
    }
    if a.n.iter().any(|&n| n > LARGE_N) && !a.force {
        eprintln!("warning: grid has n above {LARGE_N}; the greedy pass is quadratic in n");
        return usage("pass --force to sweep anyway");
    }
    let seeds: Vec<u64> = (0..a.reps.max(1)).map(|k| a.seed.wrapping_add(k)).collect();
    let cells = grid(&a.gen, &a.n, &a.dim, &a.eps, &seeds);
    let opts = SweepOptions {
        certify: a.certify,
        timing: !a.no_timing,
        jobs: a.jobs,
    };
    let rows = run_sweep(&cells, &opts, sink(a.out.as_deref())?)?;
    let summary = SweepSummary {
        schema: 1,
        cells: rows.len(),
        growth: growth_ratios(&rows),
    };
    match &a.summary {
        Some(p) => emit_json(&summary, Some(p))?,
        None => eprintln!("{}", serde_json::to_string_pretty(&summary)?),
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Build(a) => cmd_build(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let bad_eps = matches!(
                e.downcast_ref::<spanlab::spanner::SpannerError>(),
                Some(spanlab::spanner::SpannerError::InvalidEps { .. })
            );
            if e.downcast_ref::<Usage>().is_some() || bad_eps {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
