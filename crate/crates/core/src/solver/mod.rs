//! Search for consistent rotation maps.
//!
//! Under the permutation criterion every regular graph has a consistent map
//! and [`solve_permutation`] builds one in polynomial time. Under the
//! involution criterion a consistent map is a proper d-edge-coloring, which
//! need not exist (Petersen graph, odd cycles, `K_n` for odd `n`); the
//! coloring heuristics and the exhaustive oracle target that case.
//!
//! Every map reported as solved has been re-checked with the predicates in
//! [`crate::rotmap`] before it is returned.

mod coloring;
mod exhaustive;
mod matching;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coloring::{vizing_color, EdgeColoring};
pub use matching::hopcroft_karp;

use crate::graph::{generate_graph, FamilySpec, GraphError, RegularGraph};
use crate::rotmap::{check_consistent, Criterion, RotationMap};
use crate::FORMAT_VERSION;
use coloring::{SearchLimits, SearchResult};

/// Default ceiling on `n·d` for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CEILING: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Matching,
    GreedyColoring,
    Vizing,
    LocalSearch,
    Exhaustive,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "matching" => Ok(Method::Matching),
            "greedy-coloring" => Ok(Method::GreedyColoring),
            "vizing" => Ok(Method::Vizing),
            "local-search" => Ok(Method::LocalSearch),
            "exhaustive" => Ok(Method::Exhaustive),
            _ => Err(format!(
                "unknown method {s:?} (expected matching|greedy-coloring|vizing|local-search|exhaustive)"
            )),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Matching => "matching",
            Method::GreedyColoring => "greedy-coloring",
            Method::Vizing => "vizing",
            Method::LocalSearch => "local-search",
            Method::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub criterion: Criterion,
    pub method: Method,
    pub seed: u64,
    /// Iterations per restart for local search.
    pub max_iterations: usize,
    pub max_restarts: usize,
    /// Wall-clock cap for the heuristics. Runs that hit it are not
    /// reproducible; leave it generous when determinism matters.
    pub time_budget: Duration,
    /// Largest `n·d` accepted by the exhaustive method.
    pub exhaustive_ceiling: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            criterion: Criterion::Permutation,
            method: Method::Matching,
            seed: 0,
            max_iterations: 200_000,
            max_restarts: 10,
            time_budget: Duration::from_secs(60),
            exhaustive_ceiling: DEFAULT_EXHAUSTIVE_CEILING,
        }
    }
}

impl SolverConfig {
    pub fn new(criterion: Criterion, method: Method) -> Self {
        Self { criterion, method, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.max_iterations == 0 || self.max_restarts == 0 || self.time_budget.is_zero() {
            return Err(SolverError::Config("budgets must be positive".into()));
        }
        if self.exhaustive_ceiling == 0 {
            return Err(SolverError::Config("exhaustive ceiling must be positive".into()));
        }
        match (self.method, self.criterion) {
            (Method::Matching, Criterion::Involution) => Err(SolverError::Config(
                "the matching method produces permutation-consistent maps only".into(),
            )),
            (Method::GreedyColoring | Method::Vizing | Method::LocalSearch, Criterion::Permutation) => {
                Err(SolverError::Config(format!(
                    "{} searches edge colorings; use it with the involution criterion",
                    self.method
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Solved,
    InfeasibleProven,
    BudgetExhausted,
}

impl std::fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverStatus::Solved => "solved",
            SolverStatus::InfeasibleProven => "infeasible-proven",
            SolverStatus::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub iterations: u64,
    pub restarts: usize,
    pub wall_ms: u64,
    /// Lowest conflict count reached (0 when solved).
    pub best_conflicts: usize,
    /// Conflict count after every local-search iteration, or after every
    /// greedy restart.
    pub conflict_trace: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    pub map: Option<RotationMap>,
    pub certificate: Option<String>,
    pub stats: SolverStats,
}

impl SolverOutcome {
    /// Outcome with `wall_ms` cleared, for comparing runs.
    pub fn without_timing(&self) -> SolverOutcome {
        let mut o = self.clone();
        o.stats.wall_ms = 0;
        o
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("instance too large for exhaustive search: n·d = {slots} exceeds ceiling {ceiling}")]
    TooLarge { slots: usize, ceiling: usize },
    #[error("solver defect: {0}")]
    Defect(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Permutation-consistent map via `d` successive perfect matchings of the
/// bipartite arc graph. Always solves a regular graph.
pub fn solve_permutation(graph: &RegularGraph) -> Result<SolverOutcome, SolverError> {
    let start = Instant::now();
    let map = matching::matching_map(graph)
        .map_err(|round| SolverError::Defect(format!("no perfect matching in round {}", round + 1)))?;
    let outcome = SolverOutcome {
        status: SolverStatus::Solved,
        map: Some(map),
        certificate: None,
        stats: SolverStats { iterations: graph.d() as u64, restarts: 1, wall_ms: elapsed_ms(start), ..Default::default() },
    };
    verified(outcome, Criterion::Permutation)
}

/// Involution-criterion heuristics: greedy labelings, Vizing, or Kempe-chain
/// local search, according to `config.method`.
pub fn solve_edge_coloring(graph: &RegularGraph, config: &SolverConfig) -> Result<SolverOutcome, SolverError> {
    config.validate()?;
    if config.criterion != Criterion::Involution {
        return Err(SolverError::Config("edge coloring targets the involution criterion".into()));
    }
    let start = Instant::now();
    let limits = SearchLimits {
        max_iterations: config.max_iterations,
        max_restarts: config.max_restarts,
        deadline: Some(start + config.time_budget),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let outcome = match config.method {
        Method::Vizing => {
            let coloring = vizing_color(graph);
            match coloring.to_rotation_map(graph) {
                Some(map) => SolverOutcome {
                    status: SolverStatus::Solved,
                    map: Some(map),
                    certificate: None,
                    stats: SolverStats { iterations: 1, restarts: 1, wall_ms: elapsed_ms(start), ..Default::default() },
                },
                None => {
                    // Report the conflicts left after folding the spare color.
                    let folded = coloring::local_search(
                        graph,
                        &SearchLimits { max_iterations: 0, max_restarts: 1, deadline: None },
                        &mut rng,
                    );
                    SolverOutcome {
                        status: SolverStatus::BudgetExhausted,
                        map: None,
                        certificate: None,
                        stats: SolverStats {
                            iterations: 1,
                            restarts: 1,
                            wall_ms: elapsed_ms(start),
                            best_conflicts: folded.best.conflicts(),
                            conflict_trace: vec![folded.best.conflicts()],
                        },
                    }
                }
            }
        }
        Method::GreedyColoring => from_search(graph, coloring::greedy_restarts(graph, &limits, &mut rng), start),
        Method::LocalSearch => from_search(graph, coloring::local_search(graph, &limits, &mut rng), start),
        Method::Matching | Method::Exhaustive => {
            return Err(SolverError::Config(format!("{} is not an edge-coloring method", config.method)))
        }
    };
    verified(outcome, Criterion::Involution)
}

fn from_search(graph: &RegularGraph, res: SearchResult, start: Instant) -> SolverOutcome {
    let best_conflicts = res.best.conflicts();
    let map = if best_conflicts == 0 { res.best.coloring().to_rotation_map(graph) } else { None };
    SolverOutcome {
        status: if map.is_some() { SolverStatus::Solved } else { SolverStatus::BudgetExhausted },
        map,
        certificate: None,
        stats: SolverStats {
            iterations: res.iterations,
            restarts: res.restarts,
            wall_ms: elapsed_ms(start),
            best_conflicts,
            conflict_trace: res.trace,
        },
    }
}

/// Complete search, for instances with `n·d <= config.exhaustive_ceiling`.
pub fn exhaustive_search(graph: &RegularGraph, config: &SolverConfig) -> Result<SolverOutcome, SolverError> {
    let slots = graph.n() * graph.d();
    if slots > config.exhaustive_ceiling {
        return Err(SolverError::TooLarge { slots, ceiling: config.exhaustive_ceiling });
    }
    if graph.n() > 64 {
        return Err(SolverError::TooLarge { slots, ceiling: 64 });
    }
    let start = Instant::now();
    let trace = match config.criterion {
        Criterion::Permutation => exhaustive::permutation(graph),
        Criterion::Involution => exhaustive::involution(graph),
    };
    let solved = trace.map.is_some();
    let outcome = SolverOutcome {
        status: if solved { SolverStatus::Solved } else { SolverStatus::InfeasibleProven },
        certificate: (!solved).then(|| {
            format!(
                "complete backtracking over {} search nodes (labels at vertex 1 fixed by symmetry) found no {}-consistent rotation map",
                trace.nodes, config.criterion
            )
        }),
        map: trace.map,
        stats: SolverStats {
            iterations: trace.nodes,
            restarts: 1,
            wall_ms: elapsed_ms(start),
            best_conflicts: if solved { 0 } else { 1 },
            conflict_trace: Vec::new(),
        },
    };
    verified(outcome, config.criterion)
}

/// Dispatches on `config.method`.
pub fn solve(graph: &RegularGraph, config: &SolverConfig) -> Result<SolverOutcome, SolverError> {
    config.validate()?;
    match config.method {
        Method::Matching => solve_permutation(graph),
        Method::Exhaustive => exhaustive_search(graph, config),
        Method::GreedyColoring | Method::Vizing | Method::LocalSearch => solve_edge_coloring(graph, config),
    }
}

fn verified(outcome: SolverOutcome, criterion: Criterion) -> Result<SolverOutcome, SolverError> {
    if outcome.status == SolverStatus::Solved {
        let map = outcome.map.as_ref().ok_or_else(|| SolverError::Defect("solved without a map".into()))?;
        let report = check_consistent(map, criterion);
        if !report.consistent {
            return Err(SolverError::Defect(format!(
                "solver produced a map failing the {criterion} check ({} violations)",
                report.violations.len()
            )));
        }
    }
    Ok(outcome)
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Machine-readable summary of a solver run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub version: String,
    pub status: SolverStatus,
    pub criterion: Criterion,
    pub method: Method,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub iterations: u64,
    pub restarts: usize,
    pub best_conflicts: usize,
    pub wall_ms: u64,
}

impl StatsReport {
    pub fn new(graph: &RegularGraph, config: &SolverConfig, outcome: &SolverOutcome) -> Self {
        Self {
            version: FORMAT_VERSION.into(),
            status: outcome.status,
            criterion: config.criterion,
            method: config.method,
            seed: config.seed,
            n: graph.n(),
            d: graph.d(),
            iterations: outcome.stats.iterations,
            restarts: outcome.stats.restarts,
            best_conflicts: outcome.stats.best_conflicts,
            wall_ms: outcome.stats.wall_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Generates the instance described by `spec` and runs the configured
/// solver on it.
pub fn stress_run(spec: &FamilySpec, config: &SolverConfig) -> Result<(RegularGraph, SolverOutcome, StatsReport), SolverError> {
    let graph = generate_graph(spec)?;
    let outcome = solve(&graph, config)?;
    let report = StatsReport::new(&graph, config, &outcome);
    Ok((graph, outcome, report))
}
