//! Coined discrete-time quantum walks on regular graphs.
//!
//! The walk operator is `U = S·C`: a coin `C` mixes the `d` coin states at
//! every vertex, then the shift `S` moves coin state `j` at vertex `v` to
//! vertex `Rot(v, j)`, where `Rot` is a rotation map of the graph. `S` is
//! unitary exactly when every column of the rotation map is a permutation of
//! the vertices. The naive map that lists each vertex's neighbors in
//! ascending order usually fails this and the walk then leaks or gains norm.
//!
//! * [`graph`]: regular graphs, named families, edge-list format.
//! * [`rotmap`]: rotation maps, the greedy map, both consistency checks.
//! * [`solver`]: search for consistent maps (bipartite matchings, edge
//!   coloring heuristics, exhaustive search).
//! * [`qop`]: shift and coin operators, exact unitarity defect.
//! * [`walk`]: state evolution, distributions, norm trajectories.
//!
//! Indices are 0-based throughout the library; every text, CSV and JSON
//! format is 1-based.

pub mod graph;
pub mod qop;
pub mod rotmap;
pub mod solver;
pub mod walk;

/// Value of the `version` field carried by every JSON document.
pub const FORMAT_VERSION: &str = "1";

pub use graph::{generate_graph, parse_graph, FamilySpec, RegularGraph};
pub use qop::{build_coin, build_shift, unitarity_defect, CoinKind, CoinOperator, ShiftOperator};
pub use rotmap::{
    check_involution_consistent, check_permutation_consistent, greedy_rotation, Criterion, RotationMap,
};
pub use solver::{solve, SolverConfig, SolverOutcome, SolverStatus};
pub use walk::{distribution, init_state, run, step, WalkState, WalkTrajectory};
