//! `rotwalk` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or format error, 3 solver did not
//! solve, 4 walk refused an inconsistent rotation map.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use rotwalk::graph::{parse_graph, FamilySpec, RegularGraph};
use rotwalk::qop::{build_coin, build_shift, unitarity_defect, CoinKind, DENSE_LIMIT};
use rotwalk::rotmap::{
    check_consistent, check_permutation_consistent, greedy_rotation, parse_rotation, parse_rotation_for, Criterion,
    Violation,
};
use rotwalk::solver::{solve, Method, SolverConfig, SolverStatus, StatsReport};
use rotwalk::walk::{init_state, run, WalkState};
use rotwalk::FORMAT_VERSION;

#[derive(Parser)]
#[command(name = "rotwalk", version, about = "Rotation maps, shift operators and coined quantum walks on regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a regular graph as a 1-based edge list.
    Gen {
        /// cycle, complete, complete-bipartite, hypercube, torus, circulant, random-regular
        family: String,
        /// Family parameters, e.g. `80 12` for random-regular.
        params: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Produce a rotation map for a graph.
    Rotmap {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = RotmapMode::Greedy)]
        mode: RotmapMode,
        /// Map to validate in from-file mode.
        #[arg(long, required_if_eq("mode", "from-file"))]
        map: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a rotation map for consistency and report the shift defect.
    Check {
        rotmap: PathBuf,
        #[arg(long, default_value = "permutation")]
        criterion: Criterion,
        /// Include the dense S·S† matrix (only when d·n <= 64).
        #[arg(long)]
        emit_product: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a consistent rotation map.
    Solve {
        graph: PathBuf,
        #[arg(long, default_value = "involution")]
        criterion: Criterion,
        /// matching, greedy-coloring, vizing, local-search, exhaustive
        #[arg(long)]
        method: Option<Method>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        max_restarts: Option<usize>,
        #[arg(long)]
        time_budget_ms: Option<u64>,
        #[arg(long)]
        exhaustive_ceiling: Option<usize>,
        /// Rotation map output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stats JSON output; stderr when absent.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Dump the dense shift operator of a small rotation map as JSON.
    Shift {
        rotmap: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a coined walk and write its trajectory.
    Walk {
        graph: PathBuf,
        rotmap: PathBuf,
        #[arg(long, default_value = "grover")]
        coin: CoinKind,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// `uniform`, or `label,vertex[,re,im]` entries separated by `;`
        /// (1-based labels and vertices).
        #[arg(long, default_value = "uniform")]
        start: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Run even if the map is not permutation-consistent.
        #[arg(long)]
        allow_inconsistent: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RotmapMode {
    Greedy,
    FromFile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn load_graph(path: &Path) -> anyhow::Result<RegularGraph> {
    parse_graph(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn violation_json(v: &Violation) -> Value {
    match *v {
        Violation::Multiplicity { label, vertex, count } => {
            json!({"kind": "multiplicity", "label": label + 1, "vertex": vertex + 1, "count": count})
        }
        Violation::Unmatched { label, vertex, partner } => {
            json!({"kind": "unmatched", "label": label + 1, "vertex": vertex + 1, "partner": partner + 1})
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn cmd_gen(family: &str, params: &[usize], seed: u64, out: Option<&Path>) -> CmdResult {
    let spec = FamilySpec::from_args(family, params, seed).map_err(anyhow::Error::from)?;
    let g = rotwalk::generate_graph(&spec).map_err(anyhow::Error::from)?;
    emit(out, &g.to_edge_list())?;
    Ok(())
}

fn cmd_rotmap(graph: &Path, mode: RotmapMode, map: Option<&Path>, out: Option<&Path>) -> CmdResult {
    let g = load_graph(graph)?;
    let rot = match mode {
        RotmapMode::Greedy => greedy_rotation(&g),
        RotmapMode::FromFile => {
            let p = map.ok_or_else(|| anyhow!("--mode from-file needs --map"))?;
            parse_rotation_for(&read(p)?, &g).with_context(|| format!("in {}", p.display()))?
        }
    };
    emit(out, &rot.to_text())?;
    Ok(())
}

fn cmd_check(path: &Path, criterion: Criterion, emit_product: bool, out: Option<&Path>) -> CmdResult {
    let rot = parse_rotation(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let report = check_consistent(&rot, criterion);
    let unitarity = unitarity_defect(&rot);
    let mut doc = json!({
        "version": FORMAT_VERSION,
        "criterion": criterion.to_string(),
        "consistent": report.consistent,
        "defect": unitarity.defect,
        "violations": report.violations.iter().map(violation_json).collect::<Vec<_>>(),
    });
    if emit_product {
        if rot.n() * rot.d() > DENSE_LIMIT {
            eprintln!("warning: d·n = {} exceeds {DENSE_LIMIT}; product omitted", rot.n() * rot.d());
        } else {
            doc["product"] = json!(unitarity.product.expect("small products are kept"));
        }
    }
    emit(out, &pretty(&doc))?;
    Ok(())
}

struct SolveArgs {
    criterion: Criterion,
    method: Option<Method>,
    seed: u64,
    max_iterations: Option<usize>,
    max_restarts: Option<usize>,
    time_budget_ms: Option<u64>,
    exhaustive_ceiling: Option<usize>,
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        let method = self.method.unwrap_or(match self.criterion {
            Criterion::Permutation => Method::Matching,
            Criterion::Involution => Method::LocalSearch,
        });
        let mut cfg = SolverConfig::new(self.criterion, method).with_seed(self.seed);
        if let Some(x) = self.max_iterations {
            cfg.max_iterations = x;
        }
        if let Some(x) = self.max_restarts {
            cfg.max_restarts = x;
        }
        if let Some(x) = self.time_budget_ms {
            cfg.time_budget = Duration::from_millis(x);
        }
        if let Some(x) = self.exhaustive_ceiling {
            cfg.exhaustive_ceiling = x;
        }
        cfg
    }
}

fn cmd_solve(graph: &Path, args: &SolveArgs, out: Option<&Path>, stats: Option<&Path>) -> CmdResult {
    let g = load_graph(graph)?;
    let cfg = args.config();
    let outcome = solve(&g, &cfg).map_err(anyhow::Error::from)?;
    let report = StatsReport::new(&g, &cfg, &outcome);
    let mut stats_text = report.to_json();
    stats_text.push('\n');
    match stats {
        Some(p) => fs::write(p, &stats_text).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{stats_text}"),
    }
    match (&outcome.status, &outcome.map) {
        (SolverStatus::Solved, Some(map)) => {
            emit(out, &map.to_text())?;
            Ok(())
        }
        (status, _) => {
            let mut msg = format!("solver finished with status {status}");
            if let Some(cert) = &outcome.certificate {
                msg.push_str(&format!(" ({cert})"));
            }
            Err(Failure { code: 3, error: anyhow!(msg) })
        }
    }
}

fn cmd_shift(path: &Path, out: Option<&Path>) -> CmdResult {
    let rot = parse_rotation(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let dump = build_shift(&rot).dump().map_err(anyhow::Error::from)?;
    let mut text = serde_json::to_string_pretty(&dump).context("serializing shift")?;
    text.push('\n');
    emit(out, &text)?;
    Ok(())
}

/// Parses `uniform` or `label,vertex[,re,im];...` with 1-based indices.
fn parse_start(spec: &str, n: usize, d: usize) -> anyhow::Result<WalkState> {
    let spec = spec.trim();
    if spec == "uniform" {
        return Ok(WalkState::uniform(n, d));
    }
    let mut support = Vec::new();
    for entry in spec.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let fields: Vec<&str> = entry.split(',').map(str::trim).collect();
        if fields.len() != 2 && fields.len() != 4 {
            bail!("start entry {entry:?}: expected label,vertex or label,vertex,re,im");
        }
        let index = |s: &str, what: &str, max: usize| -> anyhow::Result<usize> {
            let x: usize = s.parse().with_context(|| format!("start entry {entry:?}: bad {what}"))?;
            if x == 0 || x > max {
                bail!("start entry {entry:?}: {what} {x} outside 1..={max}");
            }
            Ok(x - 1)
        };
        let label = index(fields[0], "label", d)?;
        let vertex = index(fields[1], "vertex", n)?;
        let amp = if fields.len() == 4 {
            let re: f64 = fields[2].parse().with_context(|| format!("start entry {entry:?}: bad real part"))?;
            let im: f64 = fields[3].parse().with_context(|| format!("start entry {entry:?}: bad imaginary part"))?;
            Complex64::new(re, im)
        } else {
            Complex64::new(1.0, 0.0)
        };
        support.push((label, vertex, amp));
    }
    Ok(init_state(n, d, &support)?)
}

struct WalkArgs<'a> {
    coin: CoinKind,
    steps: usize,
    start: &'a str,
    format: Format,
    allow_inconsistent: bool,
}

fn cmd_walk(graph: &Path, rotmap: &Path, args: &WalkArgs, out: Option<&Path>) -> CmdResult {
    let g = load_graph(graph)?;
    let rot = parse_rotation_for(&read(rotmap)?, &g).with_context(|| format!("in {}", rotmap.display()))?;
    let report = check_permutation_consistent(&rot);
    if !report.consistent {
        let first = report.violations.first().map(violation_json).unwrap_or(Value::Null);
        let msg = format!("rotation map violates the {} criterion (first violation: {first})", report.criterion);
        if !args.allow_inconsistent {
            return Err(Failure { code: 4, error: anyhow!("{msg}; pass --allow-inconsistent to run anyway") });
        }
        eprintln!("warning: {msg}; norms will not be conserved");
    }
    let coin = build_coin(args.coin, g.d()).map_err(anyhow::Error::from)?;
    let start = parse_start(args.start, g.n(), g.d())?;
    let traj = run(&start, &coin, &build_shift(&rot), args.steps).map_err(anyhow::Error::from)?;
    let text = match args.format {
        Format::Csv => traj.to_csv(),
        Format::Json => {
            let mut s = traj.to_json();
            s.push('\n');
            s
        }
    };
    emit(out, &text)?;
    Ok(())
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Gen { family, params, seed, out } => cmd_gen(&family, &params, seed, out.as_deref()),
        Command::Rotmap { graph, mode, map, out } => cmd_rotmap(&graph, mode, map.as_deref(), out.as_deref()),
        Command::Check { rotmap, criterion, emit_product, out } => {
            cmd_check(&rotmap, criterion, emit_product, out.as_deref())
        }
        Command::Solve {
            graph,
            criterion,
            method,
            seed,
            max_iterations,
            max_restarts,
            time_budget_ms,
            exhaustive_ceiling,
            out,
            stats,
        } => {
            let args =
                SolveArgs { criterion, method, seed, max_iterations, max_restarts, time_budget_ms, exhaustive_ceiling };
            cmd_solve(&graph, &args, out.as_deref(), stats.as_deref())
        }
        Command::Shift { rotmap, out } => cmd_shift(&rotmap, out.as_deref()),
        Command::Walk { graph, rotmap, coin, steps, start, format, allow_inconsistent, out } => {
            let args = WalkArgs { coin, steps, start: &start, format, allow_inconsistent };
            cmd_walk(&graph, &rotmap, &args, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
