//! Simple d-regular graphs: construction, validation, the edge-list text
//! format, and the named families used as solver test beds.
//!
//! Vertices are 0-based inside the library. The edge-list format is 1-based:
//!
//! ```text
//! # the square
//! 4 2
//! 1 2
//! 2 3
//! 3 4
//! 1 4
//! ```
//!
//! The header is `n d`; every other non-empty, non-comment line is an edge
//! `u v` with `1 <= u < v <= n`. Edge order is not significant. On input the
//! endpoints may also be written as `v u`; output always uses `u < v`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of pairing attempts for random regular generation.
pub const DEFAULT_MAX_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid family parameters: {0}")]
    InvalidParameters(String),
    #[error("random regular generation exhausted after {attempts} attempts (n={n}, d={d})")]
    GenerationExhausted { n: usize, d: usize, attempts: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("graph is not regular: {0}")]
    Regularity(RegularityViolation),
    #[error("malformed adjacency: {0}")]
    Structure(String),
}

/// Vertices whose degree deviates from the expected one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityViolation {
    /// Degree the graph was expected to have: the header degree when parsing,
    /// the most common degree when checking an adjacency matrix.
    pub expected: usize,
    /// `(vertex, degree)` pairs, 0-based vertices, ascending.
    pub deviant: Vec<(usize, usize)>,
}

impl std::fmt::Display for RegularityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "expected degree {}; ", self.expected)?;
        let parts: Vec<String> = self
            .deviant
            .iter()
            .map(|(v, deg)| format!("vertex {} has degree {}", v + 1, deg))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// A simple undirected d-regular graph on vertices `0..n`.
///
/// Neighbor lists are kept sorted ascending. Values are immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    neighbors: Vec<Vec<usize>>,
}

impl RegularGraph {
    /// Builds a graph from 0-based edges, checking simplicity and regularity.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Structure("graph has no vertices".into()));
        }
        let mut sets = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::Structure(format!(
                    "edge ({}, {}) out of range for n={n}",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(GraphError::Structure(format!("self-loop at vertex {}", u + 1)));
            }
            if !sets[u].insert(v) {
                return Err(GraphError::Structure(format!(
                    "duplicate edge ({}, {})",
                    u.min(v) + 1,
                    u.max(v) + 1
                )));
            }
            sets[v].insert(u);
        }
        let neighbors: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let d = neighbors[0].len();
        Self::from_sorted_neighbors(d, neighbors)
    }

    fn from_sorted_neighbors(d: usize, neighbors: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let deviant: Vec<(usize, usize)> = neighbors
            .iter()
            .enumerate()
            .filter(|(_, nb)| nb.len() != d)
            .map(|(v, nb)| (v, nb.len()))
            .collect();
        if !deviant.is_empty() {
            return Err(GraphError::Regularity(RegularityViolation { expected: d, deviant }));
        }
        if d == 0 {
            return Err(GraphError::Structure("degree must be positive".into()));
        }
        Ok(Self { n: neighbors.len(), d, neighbors })
    }

    /// Builds a graph from a boolean adjacency matrix.
    pub fn from_adjacency(adjacency: &[Vec<bool>]) -> Result<Self, GraphError> {
        check_regularity(adjacency)?;
        let neighbors = adjacency
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, &a)| a).map(|(w, _)| w).collect())
            .collect::<Vec<Vec<usize>>>();
        let d = neighbors[0].len();
        Self::from_sorted_neighbors(d, neighbors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.d / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nb) in self.neighbors.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.n]; self.n];
        for (u, nb) in self.neighbors.iter().enumerate() {
            for &v in nb {
                a[u][v] = true;
            }
        }
        a
    }

    /// Serializes to the 1-based edge-list format.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.d);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{} {}", u + 1, v + 1);
        }
        s
    }
}

/// Parses the 1-based edge-list format.
pub fn parse_graph(text: &str) -> Result<RegularGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(GraphError::Format {
        line: 0,
        message: "missing \"n d\" header".into(),
    })?;
    let (n, d) = parse_pair(hline, header)?;
    if n == 0 || d == 0 {
        return Err(GraphError::Format { line: hline, message: "n and d must be positive".into() });
    }
    if d >= n {
        return Err(GraphError::Format {
            line: hline,
            message: format!("degree {d} impossible for a simple graph on {n} vertices"),
        });
    }

    let mut sets = vec![BTreeSet::new(); n];
    for (lineno, line) in lines {
        let (u, v) = parse_pair(lineno, line)?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(GraphError::Format {
                line: lineno,
                message: format!("vertex out of range 1..={n}"),
            });
        }
        if u == v {
            return Err(GraphError::Format { line: lineno, message: format!("self-loop at vertex {u}") });
        }
        if !sets[u - 1].insert(v - 1) {
            let (a, b) = (u.min(v), u.max(v));
            return Err(GraphError::Format { line: lineno, message: format!("duplicate edge {a} {b}") });
        }
        sets[v - 1].insert(u - 1);
    }

    let deviant: Vec<(usize, usize)> = sets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() != d)
        .map(|(v, s)| (v, s.len()))
        .collect();
    if !deviant.is_empty() {
        return Err(GraphError::Regularity(RegularityViolation { expected: d, deviant }));
    }
    RegularGraph::from_sorted_neighbors(d, sets.into_iter().map(|s| s.into_iter().collect()).collect())
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), GraphError> {
    let mut it = text.split_whitespace();
    let bad = |message: String| GraphError::Format { line, message };
    let a = it.next().ok_or_else(|| bad("expected two integers".into()))?;
    let b = it.next().ok_or_else(|| bad("expected two integers".into()))?;
    if it.next().is_some() {
        return Err(bad(format!("trailing tokens in \"{text}\"")));
    }
    let a = a.parse().map_err(|_| bad(format!("not a non-negative integer: {a:?}")))?;
    let b = b.parse().map_err(|_| bad(format!("not a non-negative integer: {b:?}")))?;
    Ok((a, b))
}

/// Returns the common degree of a square, symmetric, loop-free adjacency
/// matrix, or the list of every vertex whose degree differs from vertex 0's.
pub fn check_regularity(adjacency: &[Vec<bool>]) -> Result<usize, GraphError> {
    let n = adjacency.len();
    if n == 0 {
        return Err(GraphError::Structure("empty adjacency".into()));
    }
    for (u, row) in adjacency.iter().enumerate() {
        if row.len() != n {
            return Err(GraphError::Structure(format!("row {} has length {}, expected {n}", u + 1, row.len())));
        }
        if row[u] {
            return Err(GraphError::Structure(format!("self-loop at vertex {}", u + 1)));
        }
        for (v, &a) in row.iter().enumerate() {
            if a != adjacency[v][u] {
                return Err(GraphError::Structure(format!("asymmetric entry ({}, {})", u + 1, v + 1)));
            }
        }
    }
    let degrees: Vec<usize> = adjacency.iter().map(|r| r.iter().filter(|&&a| a).count()).collect();
    // Expected degree is the most common one (the larger on ties), so a
    // single deviant vertex 0 does not make every other vertex look wrong.
    let mut tally = std::collections::BTreeMap::new();
    for &deg in &degrees {
        *tally.entry(deg).or_insert(0usize) += 1;
    }
    let expected = tally.iter().max_by_key(|(deg, count)| (**count, **deg)).map(|(d, _)| *d).unwrap();
    let deviant: Vec<(usize, usize)> =
        degrees.iter().enumerate().filter(|(_, &deg)| deg != expected).map(|(v, &deg)| (v, deg)).collect();
    if deviant.is_empty() {
        Ok(expected)
    } else {
        Err(GraphError::Regularity(RegularityViolation { expected, deviant }))
    }
}

/// Named regular graph families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// Cycle on `n >= 3` vertices, edges `i ~ i+1 (mod n)`.
    Cycle { n: usize },
    /// Complete graph `K_n`, `n >= 2`.
    Complete { n: usize },
    /// `K_{k,k}`: vertices `0..k` on one side, `k..2k` on the other.
    CompleteBipartite { k: usize },
    /// Hypercube `Q_dim`; vertices are bit strings, adjacent when they
    /// differ in one bit.
    Hypercube { dim: usize },
    /// `rows x cols` toroidal grid (4-regular), both sides `>= 3`.
    /// Vertex `(r, c)` has index `r * cols + c`.
    Torus { rows: usize, cols: usize },
    /// Circulant graph on `Z_n`. The connection set is `offsets` closed
    /// under negation, so `[1, 3]` on `n = 8` gives degree 4.
    Circulant { n: usize, offsets: Vec<usize> },
    /// Random d-regular graph from the pairing model.
    RandomRegular { n: usize, d: usize, seed: u64, max_retries: usize },
}

impl FamilySpec {
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Self {
        FamilySpec::RandomRegular { n, d, seed, max_retries: DEFAULT_MAX_RETRIES }
    }

    /// Builds a spec from a family name and positional integer parameters,
    /// as accepted on the command line.
    pub fn from_args(family: &str, params: &[usize], seed: u64) -> Result<Self, GraphError> {
        let want = |k: usize| -> Result<(), GraphError> {
            if params.len() != k {
                Err(GraphError::InvalidParameters(format!(
                    "{family} takes {k} parameter(s), got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        Ok(match family {
            "cycle" => {
                want(1)?;
                FamilySpec::Cycle { n: params[0] }
            }
            "complete" => {
                want(1)?;
                FamilySpec::Complete { n: params[0] }
            }
            "complete-bipartite" => {
                want(1)?;
                FamilySpec::CompleteBipartite { k: params[0] }
            }
            "hypercube" => {
                want(1)?;
                FamilySpec::Hypercube { dim: params[0] }
            }
            "torus" => {
                want(2)?;
                FamilySpec::Torus { rows: params[0], cols: params[1] }
            }
            "circulant" => {
                if params.len() < 2 {
                    return Err(GraphError::InvalidParameters("circulant takes n followed by at least one offset".into()));
                }
                FamilySpec::Circulant { n: params[0], offsets: params[1..].to_vec() }
            }
            "random-regular" => {
                want(2)?;
                FamilySpec::random_regular(params[0], params[1], seed)
            }
            other => return Err(GraphError::InvalidParameters(format!("unknown family {other:?}"))),
        })
    }
}

/// Generates the graph described by `spec`. Deterministic for a given spec.
pub fn generate_graph(spec: &FamilySpec) -> Result<RegularGraph, GraphError> {
    let invalid = |m: String| Err(GraphError::InvalidParameters(m));
    match *spec {
        FamilySpec::Cycle { n } => {
            if n < 3 {
                return invalid(format!("cycle needs n >= 3, got {n}"));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            RegularGraph::from_edges(n, &edges)
        }
        FamilySpec::Complete { n } => {
            if n < 2 {
                return invalid(format!("complete graph needs n >= 2, got {n}"));
            }
            let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            RegularGraph::from_edges(n, &edges)
        }
        FamilySpec::CompleteBipartite { k } => {
            if k < 1 {
                return invalid("complete bipartite graph needs k >= 1".into());
            }
            let edges: Vec<_> = (0..k).flat_map(|u| (k..2 * k).map(move |v| (u, v))).collect();
            RegularGraph::from_edges(2 * k, &edges)
        }
        FamilySpec::Hypercube { dim } => {
            if dim < 1 || dim > 24 {
                return invalid(format!("hypercube dimension must be in 1..=24, got {dim}"));
            }
            let n = 1usize << dim;
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (0..dim).map(move |b| (u, u ^ (1 << b))).filter(|&(u, v)| u < v))
                .collect();
            RegularGraph::from_edges(n, &edges)
        }
        FamilySpec::Torus { rows, cols } => {
            if rows < 3 || cols < 3 {
                return invalid(format!("torus sides must be >= 3, got {rows}x{cols}"));
            }
            let idx = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::with_capacity(2 * rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    edges.push((idx(r, c), idx(r, (c + 1) % cols)));
                    edges.push((idx(r, c), idx((r + 1) % rows, c)));
                }
            }
            RegularGraph::from_edges(rows * cols, &edges)
        }
        FamilySpec::Circulant { n, ref offsets } => {
            if n < 3 {
                return invalid(format!("circulant needs n >= 3, got {n}"));
            }
            if offsets.is_empty() {
                return invalid("circulant needs at least one offset".into());
            }
            let mut seen = BTreeSet::new();
            let mut connection = BTreeSet::new();
            for &s in offsets {
                let s = s % n;
                if s == 0 {
                    return invalid("circulant offsets must be nonzero mod n".into());
                }
                if !seen.insert(s) {
                    return invalid(format!("duplicate circulant offset {s}"));
                }
                connection.insert(s);
                connection.insert(n - s);
            }
            let edges: Vec<_> = (0..n)
                .flat_map(|u| connection.iter().map(move |&s| (u, (u + s) % n)))
                .filter(|&(u, v)| u < v)
                .collect();
            RegularGraph::from_edges(n, &edges)
        }
        FamilySpec::RandomRegular { n, d, seed, max_retries } => random_regular(n, d, seed, max_retries),
    }
}

/// Pairing-model sampler. Points are paired in shuffled rounds; pairs that
/// would form a loop or a repeated edge are returned to the pool, and the
/// whole attempt restarts once no admissible pair is left.
fn random_regular(n: usize, d: usize, seed: u64, max_retries: usize) -> Result<RegularGraph, GraphError> {
    if d == 0 || n == 0 {
        return Err(GraphError::InvalidParameters("random-regular needs n, d >= 1".into()));
    }
    if d >= n {
        return Err(GraphError::InvalidParameters(format!("no simple {d}-regular graph on {n} vertices")));
    }
    if n * d % 2 != 0 {
        return Err(GraphError::InvalidParameters(format!("n*d must be even, got {n}*{d}")));
    }
    if max_retries == 0 {
        return Err(GraphError::InvalidParameters("max_retries must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_retries {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            return RegularGraph::from_edges(n, &edges);
        }
    }
    Err(GraphError::GenerationExhausted { n, d, attempts: max_retries })
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    while !points.is_empty() {
        points.shuffle(rng);
        let mut leftover = Vec::new();
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u != v && !adj[u].contains(&v) {
                adj[u].insert(v);
                adj[v].insert(u);
                edges.push((u.min(v), u.max(v)));
            } else {
                leftover.extend_from_slice(pair);
            }
        }
        if !leftover.is_empty() {
            let admissible = leftover
                .iter()
                .enumerate()
                .any(|(i, &u)| leftover[i + 1..].iter().any(|&v| u != v && !adj[u].contains(&v)));
            if !admissible {
                return None;
            }
        }
        points = leftover;
    }
    Some(edges)
}
