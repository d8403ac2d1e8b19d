//! The `qcube` command line.
//!
//! Every subcommand writes one JSON document to stdout. Exit codes: 0 for
//! success (or no witness), 1 when `verify` finds a witness, 2 for usage and
//! input errors, 3 when a size guard is exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::coloring::{self, ColorId, ColoringSpec};
use crate::extremal::{self, EdgeBound, LIFT_GUARD};
use crate::hypercube::{self, check_dim, Subgraph};
use crate::matrix::{self, Filter};
use crate::search::{self, SearchOptions, SearchQuery};
use crate::{Error, VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_WITNESS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcube", version, about = "Hypercube colorings, cycle search and edge bounds")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Progress messages on stderr.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search every color class for monochromatic cycles.
    Verify(VerifyArgs),
    /// Count cycles of one length, with optional filters.
    Enumerate(EnumerateArgs),
    /// Color class census; optionally write the coloring file.
    Color(ColorArgs),
    /// Scan all 5x5 0/1 matrices through the case filters.
    MatrixScan(MatrixScanArgs),
    /// Two-path identity, odd-cycle lifting and the C_{4k+2} edge bound.
    Bounds(BoundsArgs),
    /// Vertex, edge and layer counts of Q_n.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    n: u32,
    /// paper4, layer2, paper4-reversed, constant or file:PATH.
    #[arg(long, default_value = "paper4")]
    coloring: String,
    #[arg(long, value_delimiter = ',', default_value = "4,6,10")]
    lengths: Vec<usize>,
    /// Only count cycles without chords in Q_n.
    #[arg(long)]
    induced: bool,
    /// Ignore the size guards.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    length: usize,
    #[arg(long)]
    induced: bool,
    /// Restrict to edge layer K.
    #[arg(long)]
    layer: Option<u32>,
    /// Coloring used with --color.
    #[arg(long, requires = "color")]
    coloring: Option<String>,
    /// Restrict to one color class.
    #[arg(long, requires = "coloring")]
    color: Option<u8>,
    /// Restrict to the edges of a subgraph file.
    #[arg(long)]
    subgraph: Option<PathBuf>,
    #[arg(long)]
    force: bool,
    /// Check inducedness only on closed cycles instead of pruning early.
    #[arg(long)]
    no_prune: bool,
}

#[derive(Args, Debug)]
struct ColorArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "paper4")]
    coloring: String,
    /// Write the coloring file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MatrixScanArgs {
    /// Skip a filter (a-g); repeatable or comma separated.
    #[arg(long = "drop-filter", value_delimiter = ',')]
    drop_filter: Vec<char>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: u32,
    /// Subgraph file.
    #[arg(long, conflicts_with = "random")]
    subgraph: Option<PathBuf>,
    /// Random subgraph, e.g. `p=0.5,seed=7`.
    #[arg(long)]
    random: Option<String>,
    /// Cycle parameter: the forbidden cycle is C_{4k+2}.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Ignore the size guards.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    n: u32,
}

/// Why a command stopped.
enum Failure {
    Usage(String),
    Guard(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Guard(_) => Failure::Guard(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

struct Ctx<'a> {
    threads: Option<usize>,
    verbose: bool,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn log(&mut self, msg: &str) {
        if self.verbose {
            let _ = writeln!(self.err, "qcube: {msg}");
        }
    }

    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "qcube: warning: {msg}");
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut ctx = Ctx {
        threads: cli.threads,
        verbose: cli.verbose,
        err,
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a, &mut ctx),
        Command::Enumerate(a) => cmd_enumerate(a, &mut ctx),
        Command::Color(a) => cmd_color(a, &mut ctx),
        Command::MatrixScan(a) => cmd_matrix_scan(a, &mut ctx),
        Command::Bounds(a) => cmd_bounds(a, &mut ctx),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok((value, code)) => {
            let text = serde_json::to_string_pretty(&value).expect("reports serialize");
            if writeln!(out, "{text}").is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.err, "qcube: error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Guard(msg)) => {
            let _ = writeln!(ctx.err, "qcube: error: {msg}");
            EXIT_GUARD
        }
    }
}

type CmdResult = Result<(serde_json::Value, i32), Failure>;

fn to_value(x: impl Serialize) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn cmd_verify(a: VerifyArgs, ctx: &mut Ctx) -> CmdResult {
    check_dim(a.n)?;
    if a.lengths.is_empty() {
        return Err(Failure::Usage("no cycle lengths given".into()));
    }
    for &l in &a.lengths {
        if l < 4 || l % 2 != 0 {
            return Err(Error::CycleLength(l).into());
        }
        search::check_guard(a.n, l, a.force)?;
        if a.n > search::guard_limit(l) {
            ctx.warn(&format!(
                "n = {} exceeds the guard {} for length {l}; continuing because of --force",
                a.n,
                search::guard_limit(l)
            ));
        }
    }
    let spec = ColoringSpec::from_name(&a.coloring, a.n)?;
    let options = SearchOptions {
        threads: ctx.threads,
        force: a.force,
        ..Default::default()
    };
    let mut results = Vec::new();
    for &l in &a.lengths {
        ctx.log(&format!("searching {} for monochromatic C_{l} (n = {})", spec.name(), a.n));
        let r = search::find_mono_cycle(&spec, l, a.induced, options)?;
        ctx.log(&format!("C_{l}: {} monochromatic cycles", r.mono_cycles));
        results.push(json!({
            "length": r.length,
            "induced": r.induced,
            "count_searched_classes": r.count_searched_classes,
            "layered": r.layered,
            "mono_cycles": r.mono_cycles,
            "work_units": r.work_units,
            "guard_limit": search::guard_limit(l),
            "witness": r.witness,
        }));
    }
    let found = results.iter().any(|r| !r["witness"].is_null());
    let value = json!({
        "version": VERSION,
        "n": a.n,
        "coloring": spec.name(),
        "palette": spec.palette(),
        "induced": a.induced,
        "force": a.force,
        "results": results,
        "witness_found": found,
    });
    Ok((value, if found { EXIT_WITNESS } else { EXIT_OK }))
}

fn cmd_enumerate(a: EnumerateArgs, ctx: &mut Ctx) -> CmdResult {
    check_dim(a.n)?;
    let mut q = SearchQuery::new(a.n, a.length)
        .induced(a.induced)
        .options(SearchOptions {
            threads: ctx.threads,
            force: a.force,
            prune_chords: !a.no_prune,
        });
    if let Some(k) = a.layer {
        q = q.layer(k);
    }
    if let (Some(name), Some(c)) = (&a.coloring, a.color) {
        q = q.color(ColoringSpec::from_name(name, a.n)?, ColorId(c));
    }
    if let Some(path) = &a.subgraph {
        let g = read_subgraph(path)?;
        q = q.subgraph(g);
    }
    if a.force && a.n > search::guard_limit(a.length) {
        ctx.warn("size guard overridden by --force");
    }
    ctx.log(&format!("enumerating C_{} in Q_{}", a.length, a.n));
    let report = search::enumerate_cycles(&q)?;
    let mut value = to_value(&report);
    value["version"] = json!(VERSION);
    value["prune_chords"] = json!(!a.no_prune);
    Ok((value, EXIT_OK))
}

fn read_subgraph(path: &PathBuf) -> Result<Subgraph, Error> {
    let file = std::fs::File::open(path)?;
    Subgraph::read_from(std::io::BufReader::new(file))
}

fn cmd_color(a: ColorArgs, ctx: &mut Ctx) -> CmdResult {
    let spec = ColoringSpec::from_name(&a.coloring, a.n)?;
    let sizes = coloring::class_sizes(&spec)?;
    if let Some(path) = &a.out {
        ctx.log(&format!("writing {}", path.display()));
        coloring::save_coloring(&spec, path)?;
    }
    let classes: Vec<_> = sizes
        .iter()
        .map(|(c, count)| json!({ "color": c, "edges": count }))
        .collect();
    let value = json!({
        "version": VERSION,
        "n": a.n,
        "coloring": spec.name(),
        "palette": spec.palette(),
        "total_edges": hypercube::edge_count(a.n),
        "class_sizes": classes,
        "largest_class": sizes.values().max(),
        "layer_separated": spec.is_layer_separated(),
        "written": a.out.as_ref().map(|p| p.display().to_string()),
    });
    Ok((value, EXIT_OK))
}

fn cmd_matrix_scan(a: MatrixScanArgs, ctx: &mut Ctx) -> CmdResult {
    let dropped = a
        .drop_filter
        .iter()
        .map(|&c| Filter::from_letter(c))
        .collect::<Result<Vec<_>, _>>()?;
    ctx.log("scanning 2^25 matrices");
    let census = matrix::exhaustive_case_scan(&dropped, ctx.threads);
    let mut value = to_value(&census);
    value["version"] = json!(VERSION);
    Ok((value, EXIT_OK))
}

/// Parses `p=P,seed=S`; either part may be omitted (defaults 0.5 and 0).
fn parse_random(spec: &str) -> Result<(f64, u64), Error> {
    let mut p = 0.5;
    let mut seed = 0;
    for part in spec.split(',').filter(|s| !s.is_empty()) {
        let bad = || Error::InvalidArgument(format!("bad --random component {part:?}"));
        match part.split_once('=') {
            Some(("p", v)) => p = v.parse().map_err(|_| bad())?,
            Some(("seed", v)) => seed = v.parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        }
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} not in [0, 1]")));
    }
    Ok((p, seed))
}

fn cmd_bounds(a: BoundsArgs, ctx: &mut Ctx) -> CmdResult {
    if a.n == 0 {
        return Err(Error::Dimension(0).into());
    }
    if a.k == 0 {
        return Err(Failure::Usage("k must be at least 1".into()));
    }
    let bound: EdgeBound<f64> = extremal::upper_bound_edges(a.n)?;
    let (source, graph) = match (&a.subgraph, &a.random) {
        (Some(path), _) => {
            let g = read_subgraph(path)?;
            if g.dim() != a.n {
                return Err(Error::DimensionMismatch(a.n, g.dim()).into());
            }
            (json!({ "kind": "file", "path": path.display().to_string() }), Some(g))
        }
        (None, Some(r)) => {
            let (p, seed) = parse_random(r)?;
            check_dim(a.n)?;
            let g = Subgraph::random(a.n, p, seed)?;
            (json!({ "kind": "random", "p": p, "seed": seed }), Some(g))
        }
        (None, None) => (json!({ "kind": "none" }), None),
    };

    let mut counts = serde_json::Value::Null;
    let mut lift = serde_json::Value::Null;
    let mut cap = serde_json::Value::Null;
    if let Some(g) = &graph {
        ctx.log("counting two-paths");
        counts = to_value(extremal::subgraph_counts(g));
        if a.n <= LIFT_GUARD || a.force {
            ctx.log("lifting odd cycles of H_v");
            lift = to_value(extremal::odd_cycle_lift_check(g, a.k, a.force)?);
        } else {
            lift = json!({ "skipped": format!("n > {LIFT_GUARD}; pass --force") });
        }
        let length = 4 * a.k as usize + 2;
        let options = SearchOptions {
            threads: ctx.threads,
            force: a.force,
            ..Default::default()
        };
        cap = match search::check_guard(a.n, length, a.force) {
            Err(_) => json!({ "skipped": format!("C_{length} search exceeds the size guard") }),
            Ok(()) => match extremal::hv_edge_cap_check(g, a.k, options) {
                Ok(c) => to_value(c),
                Err(Error::Premise(msg)) => json!({ "skipped": msg }),
                Err(e) => return Err(e.into()),
            },
        };
    }

    let value = json!({
        "version": VERSION,
        "n": a.n,
        "k": a.k,
        "source": source,
        "edges_of_cube": (a.n <= 63).then(|| hypercube_edges_u64(a.n)),
        "hv_total_cap": extremal::hv_total_cap(a.n).map(|c| c.to_string()),
        "hv_total_cap_log2": a.n as f64 + 2.0 * (a.n as f64).log2() - 2.0,
        "bound": bound,
        "counts": counts,
        "lift": lift,
        "cap_check": cap,
    });
    Ok((value, EXIT_OK))
}

fn hypercube_edges_u64(n: u32) -> u64 {
    n as u64 * (1u64 << (n - 1))
}

fn cmd_stats(a: StatsArgs) -> CmdResult {
    check_dim(a.n)?;
    let n = a.n as u64;
    let binom = |k: u64| -> u64 { (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1)) };
    let layers: Vec<_> = (0..n)
        .map(|k| json!({ "layer": k, "edges": binom(k) * (n - k) }))
        .collect();
    let value = json!({
        "version": VERSION,
        "n": a.n,
        "vertices": 1u64 << a.n,
        "edges": hypercube::edge_count(a.n),
        "layers": layers,
        "guards": {
            "length_le_6": search::guard_limit(6),
            "length_8": search::guard_limit(8),
            "length_ge_10": search::guard_limit(10),
        },
    });
    Ok((value, EXIT_OK))
}
