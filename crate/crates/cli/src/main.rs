mod input;
mod output;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use polylab_core::experiments::{
    exact_enumerate, sample_estimate, Classifier, SampleConfig, DEFAULT_MAX_BITS,
};
use polylab_core::fringe::{assemble_fringe, find_fringe_1d, FringeAssignment, FringeMode, Radius, DEFAULT_R_MAX};
use polylab_core::geometry::{geometry_report, LpsCertificate};
use polylab_core::lattice::{diffset, enumerate_lattice, sumset, uniquely_formed_diffs, Class};
use polylab_core::{Error, Point};
use serde::Serialize;
use serde_json::{json, Value};

use output::{sig6, to_json, Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("IoError: {0}")]
    Io(String),
    #[error("{0}")]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidInput(_)
                | Error::NotFullDimensional { .. }
                | Error::RedundantVertex { .. }
                | Error::NonIntegerVertex { .. }
                | Error::EmptySet => 2,
                Error::NotLps
                | Error::WindowOverlap(_)
                | Error::IncompatibleFringe(_)
                | Error::NoUniqueDiffEdge(_)
                | Error::NotFound { .. } => 3,
                Error::TooLarge { .. } | Error::SizeLimit { .. } => 4,
                Error::InternalInconsistency(_) => 1,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "polylab", version, about = "Sums and differences of lattice points in dilated polytopes")]
struct Cli {
    /// Also write a run record (command, config, input hash, results, wall time) to this file.
    #[arg(long, global = true)]
    record: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Geometry report and, with --dilate, lattice statistics.
    Analyze(AnalyzeArgs),
    /// Monte Carlo estimate of a subset proportion.
    Estimate(EstimateArgs),
    /// Exact joint histogram of missing sums and differences.
    Enumerate(EnumerateArgs),
    /// Sumset and difference set sizes of a point set (CSV, one point per line).
    Points(PointsArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    #[arg(long)]
    dilate: Option<i64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct EstimateArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1)]
    dilate: i64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// exact_sd, at_least_d, mstd, balanced or diff_dominant.
    #[arg(long, default_value = "mstd")]
    classifier: String,
    #[arg(long, default_value_t = 0)]
    s: u32,
    #[arg(long, default_value_t = 0)]
    d: u32,
    /// none, theorem1 (antipodal edge windows) or theorem2 (edge gap).
    #[arg(long, default_value = "none")]
    fringe: String,
    /// Fringe radius, an integer or a ratio `p/q`. Defaults to the widest window plus one.
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct EnumerateArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1)]
    dilate: i64,
    /// Largest |L(nP)| to enumerate. Overrides POLYLAB_MAX_BITS.
    #[arg(long)]
    max_bits: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct PointsArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// What a subcommand produced: the text to print plus the pieces of the run record.
struct Outcome {
    text: String,
    config: Value,
    results: Value,
    input: Vec<u8>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error: ParseError: {first}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Estimate(a) => estimate(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Points(a) => points(a),
    };
    let outcome = result.and_then(|o| {
        if let Some(path) = &cli.record {
            record::write(path, o.config.clone(), &o.input, o.results.clone(), start.elapsed())?;
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            print!("{}", o.text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}

fn check_dilation(n: i64) -> Result<(), CliError> {
    if n < 1 {
        return Err(Error::InvalidInput(format!("dilation must be at least 1, got {n}")).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct LatticeStats {
    n: i64,
    points: usize,
    sums: usize,
    diffs: usize,
    uniquely_formed_diffs: usize,
}

#[derive(Serialize)]
struct Witness {
    vertex: usize,
    edge: usize,
    edge_vertices: (usize, usize),
}

#[derive(Serialize)]
struct AnalyzeReport {
    polytope: String,
    dim: usize,
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
    sa_pairs: Vec<(usize, usize)>,
    lps: bool,
    lps_pairing: Option<Vec<(usize, usize)>>,
    lps_certificate: Option<LpsCertificate>,
    unique_diff_witness: Option<Witness>,
    lattice: Option<LatticeStats>,
}

fn analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let loaded = input::load_polytope(&a.file)?;
    let p = &loaded.polytope;
    let g = geometry_report(p)?;
    let lattice = match a.dilate {
        None => None,
        Some(n) => {
            check_dilation(n)?;
            let l = enumerate_lattice(p, n)?;
            Some(LatticeStats {
                n,
                points: l.len(),
                sums: sumset(&l).len(),
                diffs: diffset(&l).len(),
                uniquely_formed_diffs: uniquely_formed_diffs(&l).len(),
            })
        }
    };
    let report = AnalyzeReport {
        polytope: loaded.name.clone(),
        dim: p.dim(),
        vertices: p.vertices().to_vec(),
        edges: p.edges().to_vec(),
        sa_pairs: g.sa_pairs,
        lps: g.lps,
        lps_pairing: g.lps_pairing,
        lps_certificate: g.lps_certificate,
        unique_diff_witness: g.unique_diff_witness.map(|(vertex, edge)| Witness {
            vertex,
            edge,
            edge_vertices: p.edges()[edge],
        }),
        lattice,
    };
    let results = serde_json::to_value(&report).expect("report serializes");
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new(&["field", "value"]);
            for (k, v) in flatten(&results) {
                t.row([k, v]);
            }
            t.finish()
        }
    };
    Ok(Outcome {
        text,
        config: json!({"command": "analyze", "file": a.file, "dilate": a.dilate}),
        results,
        input: loaded.bytes,
    })
}

/// `key.sub` → compact JSON value, in document order.
fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if let Value::Object(map) = v {
        for (k, val) in map {
            match val {
                Value::Object(inner) if !inner.is_empty() => {
                    for (k2, v2) in flatten(val) {
                        out.push((format!("{k}.{k2}"), v2));
                    }
                }
                Value::String(s) => out.push((k.clone(), s.clone())),
                other => out.push((k.clone(), other.to_string())),
            }
        }
    }
    out
}

fn parse_radius(text: &str) -> Result<Radius, CliError> {
    let bad = || CliError::Parse(format!("radius {text:?} is not a nonnegative integer or ratio p/q"));
    match text.split_once('/') {
        None => {
            let r: i64 = text.trim().parse().map_err(|_| bad())?;
            if r < 0 {
                return Err(bad());
            }
            Ok(Radius::from_int(r))
        }
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if p < 0 || q <= 0 {
                return Err(bad());
            }
            Ok(Radius::from_ratio(p, q))
        }
    }
}

fn radius_text(r: Radius) -> String {
    let (num, den) = r.squared();
    if den == 1 {
        let root = (num as f64).sqrt().round() as i128;
        if root * root == num {
            return root.to_string();
        }
    }
    format!("sqrt({num}/{den})")
}

#[derive(Serialize)]
struct FringeSummary {
    mode: FringeMode,
    radius: String,
    requested_radius: String,
    forced_present: usize,
    forced_absent: usize,
    free: usize,
    predicted_missing_sums: usize,
    predicted_missing_diffs: usize,
    diffs_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_set: Option<Value>,
}

fn fringe_summary(fa: &FringeAssignment) -> FringeSummary {
    FringeSummary {
        mode: fa.mode,
        radius: radius_text(fa.radius),
        requested_radius: radius_text(fa.requested_radius),
        forced_present: fa.forced_present.len(),
        forced_absent: fa.forced_absent.len(),
        free: fa.free.len(),
        predicted_missing_sums: fa.predicted_sums,
        predicted_missing_diffs: fa.predicted_diffs,
        diffs_exact: fa.diffs_exact,
        gap_set: fa.gap_set.as_ref().map(|g| {
            let mut v = json!({
                "window": g.window,
                "present": g.present,
                "absent": g.absent(),
            });
            if !g.two_block_valid {
                v["note"] = json!(format!(
                    "two-block pattern [0,{d}-1] u [2*{d},3*{d}-1] leaves 2*{d}-1 unrepresented; using this set instead",
                    d = g.gap_size
                ));
            }
            v
        }),
    }
}

#[derive(Serialize)]
struct EstimateReport {
    polytope: String,
    n: i64,
    lattice_points: usize,
    classifier: &'static str,
    s: u32,
    d: u32,
    fringe: Option<FringeSummary>,
    samples: u64,
    seed: u64,
    hits: u64,
    proportion: f64,
    ci_low: f64,
    ci_high: f64,
}

fn estimate(a: &EstimateArgs) -> Result<Outcome, CliError> {
    let loaded = input::load_polytope(&a.file)?;
    check_dilation(a.dilate)?;
    if a.samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()).into());
    }
    let classifier = Classifier::parse(&a.classifier, a.s, a.d)?;
    let p = loaded.polytope.clone();
    let fringe = match a.fringe.as_str() {
        "none" => None,
        mode => {
            let mode: FringeMode = mode.parse()?;
            let radius = match &a.radius {
                Some(r) => parse_radius(r)?,
                None => default_radius(a.s, a.d)?,
            };
            Some(assemble_fringe(&p, a.dilate, a.s, a.d, radius, mode)?)
        }
    };
    let threads = a
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let lattice_points = enumerate_lattice(&p, a.dilate)?.len();
    let summary = fringe.as_ref().map(fringe_summary);
    let cfg = SampleConfig {
        polytope: p,
        n: a.dilate,
        samples: a.samples,
        seed: a.seed,
        fringe,
        classifier,
        threads,
    };
    let r = sample_estimate(&cfg)?;
    let report = EstimateReport {
        polytope: loaded.name.clone(),
        n: a.dilate,
        lattice_points,
        classifier: classifier.name(),
        s: a.s,
        d: a.d,
        fringe: summary,
        samples: a.samples,
        seed: a.seed,
        hits: r.hits,
        proportion: sig6(r.proportion),
        ci_low: sig6(r.ci_low),
        ci_high: sig6(r.ci_high),
    };
    let results = serde_json::to_value(&report).expect("report serializes");
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new(&[
                "polytope", "n", "classifier", "s", "d", "fringe", "radius", "samples", "seed", "hits",
                "proportion", "ci_low", "ci_high",
            ]);
            let (mode, radius) = match &report.fringe {
                Some(f) => (a.fringe.clone(), f.radius.clone()),
                None => ("none".to_string(), String::new()),
            };
            t.row([
                report.polytope.clone(),
                report.n.to_string(),
                report.classifier.to_string(),
                report.s.to_string(),
                report.d.to_string(),
                mode,
                radius,
                report.samples.to_string(),
                report.seed.to_string(),
                report.hits.to_string(),
                report.proportion.to_string(),
                report.ci_low.to_string(),
                report.ci_high.to_string(),
            ]);
            t.finish()
        }
    };
    Ok(Outcome {
        text,
        config: json!({
            "command": "estimate",
            "file": a.file,
            "dilate": a.dilate,
            "samples": a.samples,
            "seed": a.seed,
            "classifier": a.classifier,
            "s": a.s,
            "d": a.d,
            "fringe": a.fringe,
            "radius": a.radius,
            "threads": threads,
        }),
        results,
        input: loaded.bytes,
    })
}

/// Widest 1-D window needed for `(s, d)`, plus one.
fn default_radius(s: u32, d: u32) -> Result<Radius, CliError> {
    let w = find_fringe_1d(s, d, DEFAULT_R_MAX)?;
    Ok(Radius::from_int(i64::from(w.r_prime) + 1))
}

fn max_bits(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("POLYLAB_MAX_BITS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("POLYLAB_MAX_BITS={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_MAX_BITS),
    }
}

#[derive(Serialize)]
struct HistogramRow {
    missing_sums: usize,
    missing_diffs: usize,
    count: u64,
}

#[derive(Serialize)]
struct ClassTotals {
    mstd: u64,
    balanced: u64,
    diff_dominant: u64,
}

#[derive(Serialize)]
struct EnumerateReport {
    polytope: String,
    n: i64,
    lattice_points: usize,
    potential_sums: usize,
    potential_diffs: usize,
    subsets: u64,
    histogram: Vec<HistogramRow>,
    classes: ClassTotals,
}

fn enumerate(a: &EnumerateArgs) -> Result<Outcome, CliError> {
    let loaded = input::load_polytope(&a.file)?;
    check_dilation(a.dilate)?;
    let cap = max_bits(a.max_bits)?;
    let h = exact_enumerate(&loaded.polytope, a.dilate, cap)?;
    let report = EnumerateReport {
        polytope: loaded.name.clone(),
        n: a.dilate,
        lattice_points: h.lattice_size,
        potential_sums: h.potential_sums,
        potential_diffs: h.potential_diffs,
        subsets: h.total,
        histogram: h
            .counts
            .iter()
            .map(|(&(s, d), &count)| HistogramRow { missing_sums: s, missing_diffs: d, count })
            .collect(),
        classes: ClassTotals { mstd: h.mstd, balanced: h.balanced, diff_dominant: h.diff_dominant },
    };
    let results = serde_json::to_value(&report).expect("report serializes");
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new(&["missing_sums", "missing_diffs", "count"]);
            for r in &report.histogram {
                t.row([r.missing_sums.to_string(), r.missing_diffs.to_string(), r.count.to_string()]);
            }
            let mut out = t.finish();
            out.push('\n');
            let mut c = Table::new(&["class", "count"]);
            c.row(["mstd".to_string(), h.mstd.to_string()]);
            c.row(["balanced".to_string(), h.balanced.to_string()]);
            c.row(["diff_dominant".to_string(), h.diff_dominant.to_string()]);
            out.push_str(&c.finish());
            out
        }
    };
    Ok(Outcome {
        text,
        config: json!({"command": "enumerate", "file": a.file, "dilate": a.dilate, "max_bits": cap}),
        results,
        input: loaded.bytes,
    })
}

#[derive(Serialize)]
struct PointsReport {
    points: usize,
    sums: usize,
    diffs: usize,
    class: Class,
    uniquely_formed_diffs: usize,
}

fn points(a: &PointsArgs) -> Result<Outcome, CliError> {
    let bytes = input::read_bytes(&a.file)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Parse(format!("{}: {e}", display(&a.file))))?;
    let set = input::parse_point_set(&text)?;
    let (sums, diffs) = (sumset(&set).len(), diffset(&set).len());
    let report = PointsReport {
        points: set.len(),
        sums,
        diffs,
        class: Class::from_sizes(sums, diffs),
        uniquely_formed_diffs: uniquely_formed_diffs(&set).len(),
    };
    let results = serde_json::to_value(&report).expect("report serializes");
    let text = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut t = Table::new(&["points", "sums", "diffs", "class", "uniquely_formed_diffs"]);
            let class = results["class"].as_str().unwrap_or_default().to_string();
            t.row([
                report.points.to_string(),
                sums.to_string(),
                diffs.to_string(),
                class,
                report.uniquely_formed_diffs.to_string(),
            ]);
            t.finish()
        }
    };
    Ok(Outcome { text, config: json!({"command": "points", "file": a.file}), results, input: bytes })
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
