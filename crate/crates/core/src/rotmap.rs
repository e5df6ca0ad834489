//! Rotation maps in matrix form.
//!
//! A [`RotationMap`] is an `n x d` table whose entry `(v, i)` is the vertex
//! reached from `v` along the edge carrying label `i`. Column `i` read top to
//! bottom is the function `v -> Rot(v, i)` that the shift operator applies
//! when the coin is in state `i`.
//!
//! Two notions of consistency are decided here:
//!
//! * **permutation**: every column is a bijection on the vertex set. This is
//!   exactly the condition under which the shift operator is unitary.
//! * **involution**: every column is a fixed-point-free involution, i.e. each
//!   label class is a perfect matching and the labeling is a proper
//!   d-edge-coloring. This implies the permutation criterion.
//!
//! Library indices are 0-based (vertices `0..n`, labels `0..d`). The text
//! format is 1-based: a header `n d` followed by `n` rows of `d` vertices.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::RegularGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("dimension mismatch: map is {map_n}x{map_d}, graph has n={graph_n}, d={graph_d}")]
    Dimension { map_n: usize, map_d: usize, graph_n: usize, graph_d: usize },
    #[error("rotation map does not match graph: {}", describe_mismatches(.0))]
    Mismatch(Vec<Mismatch>),
}

/// An entry `(vertex, label)` of a map whose row is not the vertex's
/// neighbor set. `entry` is the offending value, `None` when the row is
/// missing a neighbor altogether.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub vertex: usize,
    pub label: Option<usize>,
    pub entry: Option<usize>,
    pub missing: Option<usize>,
}

fn describe_mismatches(ms: &[Mismatch]) -> String {
    ms.iter()
        .map(|m| match (m.label, m.entry, m.missing) {
            (Some(i), Some(w), _) => {
                format!("Rot({}, {}) = {} is not adjacent to {}", m.vertex + 1, i + 1, w + 1, m.vertex + 1)
            }
            (_, _, Some(w)) => format!("row {} never uses neighbor {}", m.vertex + 1, w + 1),
            _ => format!("row {}", m.vertex + 1),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    Permutation,
    Involution,
}

impl std::str::FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "permutation" => Ok(Criterion::Permutation),
            "involution" => Ok(Criterion::Involution),
            _ => Err(format!("unknown criterion {s:?} (expected permutation|involution)")),
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::Permutation => "permutation",
            Criterion::Involution => "involution",
        })
    }
}

/// A witness against consistency. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// `vertex` occurs `count` times in column `label` (`count != 1`).
    Multiplicity { label: usize, vertex: usize, count: usize },
    /// `Rot(vertex, label) = partner` but `Rot(partner, label) != vertex`.
    Unmatched { label: usize, vertex: usize, partner: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub criterion: Criterion,
    pub consistent: bool,
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    fn from_violations(criterion: Criterion, violations: Vec<Violation>) -> Self {
        Self { criterion, consistent: violations.is_empty(), violations }
    }
}

/// Matrix form of a rotation map, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RotationMap {
    n: usize,
    d: usize,
    entries: Vec<usize>,
}

impl RotationMap {
    /// Builds a map from 0-based rows. Each row must have `d` distinct
    /// in-range entries, none equal to the row's own vertex.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, RotationError> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if n == 0 || d == 0 {
            return Err(RotationError::Row { row: 1, message: "map must have at least one row and one label".into() });
        }
        let mut entries = Vec::with_capacity(n * d);
        for (v, row) in rows.iter().enumerate() {
            check_row(n, d, v, row)?;
            entries.extend_from_slice(row);
        }
        Ok(Self { n, d, entries })
    }

    /// Builds a map from columns: `columns[i][v] = Rot(v, i)`.
    pub fn from_columns(columns: &[Vec<usize>]) -> Result<Self, RotationError> {
        let d = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        let rows: Vec<Vec<usize>> = (0..n).map(|v| columns.iter().map(|c| c[v]).collect()).collect();
        if columns.iter().any(|c| c.len() != n) {
            return Err(RotationError::Row { row: 1, message: "columns have unequal lengths".into() });
        }
        if d == 0 {
            return Err(RotationError::Row { row: 1, message: "map must have at least one label".into() });
        }
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `Rot(v, label)`.
    #[inline]
    pub fn get(&self, v: usize, label: usize) -> usize {
        self.entries[v * self.d + label]
    }

    pub fn row(&self, v: usize) -> &[usize] {
        &self.entries[v * self.d..(v + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.chunks_exact(self.d)
    }

    /// Column `label` as a vector indexed by vertex.
    pub fn column(&self, label: usize) -> Vec<usize> {
        (0..self.n).map(|v| self.get(v, label)).collect()
    }

    /// Inverse of column `label`, when that column is a bijection.
    pub fn inverse_column(&self, label: usize) -> Option<Vec<usize>> {
        let mut inv = vec![usize::MAX; self.n];
        for v in 0..self.n {
            let w = self.get(v, label);
            if inv[w] != usize::MAX {
                return None;
            }
            inv[w] = v;
        }
        Some(inv)
    }

    /// Function form: `(w, j)` such that the edge leaving `v` with label `i`
    /// enters `w`, and `j` is the label under which `w` lists `v`. Under an
    /// involution-consistent map `j == i`; in general it need not be.
    /// `None` if `w`'s row does not list `v`.
    pub fn rotate(&self, v: usize, label: usize) -> Option<(usize, usize)> {
        let w = self.get(v, label);
        self.row(w).iter().position(|&x| x == v).map(|j| (w, j))
    }

    /// 1-based text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.d);
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|w| (w + 1).to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

fn check_row(n: usize, d: usize, v: usize, row: &[usize]) -> Result<(), RotationError> {
    let err = |message: String| Err(RotationError::Row { row: v + 1, message });
    if row.len() != d {
        return err(format!("expected {d} entries, found {}", row.len()));
    }
    for (i, &w) in row.iter().enumerate() {
        if w >= n {
            return err(format!("entry {} out of range 1..={n}", w + 1));
        }
        if w == v {
            return err(format!("label {} points back at the vertex itself", i + 1));
        }
        if row[..i].contains(&w) {
            return err(format!("vertex {} repeated in row", w + 1));
        }
    }
    Ok(())
}

/// Reads each vertex's neighbors in ascending order, one per label: scan row
/// `v` of the adjacency matrix and give the k-th nonzero column label k.
pub fn greedy_rotation(graph: &RegularGraph) -> RotationMap {
    let (n, d) = (graph.n(), graph.d());
    let mut entries = Vec::with_capacity(n * d);
    for v in 0..n {
        let mut counter = 0;
        for w in 0..n {
            if graph.is_adjacent(v, w) {
                entries.push(w);
                counter += 1;
            }
        }
        debug_assert_eq!(counter, d);
    }
    RotationMap { n, d, entries }
}

/// Counting pass per column: every vertex must appear exactly once.
pub fn check_permutation_consistent(rot: &RotationMap) -> ConsistencyReport {
    ConsistencyReport::from_violations(Criterion::Permutation, multiplicity_violations(rot))
}

fn multiplicity_violations(rot: &RotationMap) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut counts = vec![0usize; rot.n];
    for label in 0..rot.d {
        counts.iter_mut().for_each(|c| *c = 0);
        for v in 0..rot.n {
            counts[rot.get(v, label)] += 1;
        }
        violations.extend(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 1)
                .map(|(vertex, &count)| Violation::Multiplicity { label, vertex, count }),
        );
    }
    violations
}

/// Every column must be a fixed-point-free involution:
/// `Rot(Rot(v, i), i) == v` for all `v` and `i`.
pub fn check_involution_consistent(rot: &RotationMap) -> ConsistencyReport {
    let mut violations = Vec::new();
    for label in 0..rot.d {
        for v in 0..rot.n {
            let w = rot.get(v, label);
            if rot.get(w, label) != v {
                violations.push(Violation::Unmatched { label, vertex: v, partner: w });
            }
        }
    }
    ConsistencyReport::from_violations(Criterion::Involution, violations)
}

pub fn check_consistent(rot: &RotationMap, criterion: Criterion) -> ConsistencyReport {
    match criterion {
        Criterion::Permutation => check_permutation_consistent(rot),
        Criterion::Involution => check_involution_consistent(rot),
    }
}

/// Checks that row `v` of `rot` is exactly the neighbor set of `v`.
pub fn validate_against_graph(rot: &RotationMap, graph: &RegularGraph) -> Result<(), RotationError> {
    if rot.n != graph.n() || rot.d != graph.d() {
        return Err(RotationError::Dimension { map_n: rot.n, map_d: rot.d, graph_n: graph.n(), graph_d: graph.d() });
    }
    let mut mismatches = Vec::new();
    for v in 0..rot.n {
        let row = rot.row(v);
        for (label, &w) in row.iter().enumerate() {
            if !graph.is_adjacent(v, w) {
                mismatches.push(Mismatch { vertex: v, label: Some(label), entry: Some(w), missing: None });
            }
        }
        for &w in graph.neighbors(v) {
            if !row.contains(&w) {
                mismatches.push(Mismatch { vertex: v, label: None, entry: None, missing: Some(w) });
            }
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(RotationError::Mismatch(mismatches))
    }
}

/// Parses the 1-based text format. Rows must have distinct entries.
pub fn parse_rotation(text: &str) -> Result<RotationMap, RotationError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or(RotationError::Format { line: 0, message: "missing \"n d\" header".into() })?;
    let head = parse_ints(hline, header)?;
    let [n, d] = head[..] else {
        return Err(RotationError::Format { line: hline, message: "header must be \"n d\"".into() });
    };
    if n == 0 || d == 0 {
        return Err(RotationError::Format { line: hline, message: "n and d must be positive".into() });
    }
    let mut entries = Vec::with_capacity(n * d);
    let mut v = 0;
    for (lineno, line) in lines {
        if v == n {
            return Err(RotationError::Format { line: lineno, message: format!("more than {n} rows") });
        }
        let row = parse_ints(lineno, line)?;
        if row.iter().any(|&w| w == 0) {
            return Err(RotationError::Format { line: lineno, message: "vertices are 1-based".into() });
        }
        let row: Vec<usize> = row.into_iter().map(|w| w - 1).collect();
        check_row(n, d, v, &row).map_err(|e| RotationError::Format { line: lineno, message: e.to_string() })?;
        entries.extend(row);
        v += 1;
    }
    if v != n {
        return Err(RotationError::Format { line: text.lines().count(), message: format!("expected {n} rows, found {v}") });
    }
    Ok(RotationMap { n, d, entries })
}

/// Parses and validates against `graph`.
pub fn parse_rotation_for(text: &str, graph: &RegularGraph) -> Result<RotationMap, RotationError> {
    let rot = parse_rotation(text)?;
    validate_against_graph(&rot, graph)?;
    Ok(rot)
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<usize>, RotationError> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| RotationError::Format { line, message: format!("not a positive integer: {t:?}") }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_graph, FamilySpec};

    fn rows1(rows: &[&[usize]]) -> RotationMap {
        let rows: Vec<Vec<usize>> = rows.iter().map(|r| r.iter().map(|w| w - 1).collect()).collect();
        RotationMap::from_rows(&rows).unwrap()
    }

    fn square() -> RegularGraph {
        generate_graph(&FamilySpec::Cycle { n: 4 }).unwrap()
    }

    /// Up-column (2,3,4,1), down-column (4,1,2,3).
    fn consistent_square() -> RotationMap {
        rows1(&[&[2, 4], &[3, 1], &[4, 2], &[1, 3]])
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_rotation(&square()), rows1(&[&[2, 4], &[1, 3], &[2, 4], &[1, 3]]));
        let k2 = generate_graph(&FamilySpec::Complete { n: 2 }).unwrap();
        assert_eq!(greedy_rotation(&k2), rows1(&[&[2], &[1]]));
        let k4 = generate_graph(&FamilySpec::Complete { n: 4 }).unwrap();
        assert_eq!(greedy_rotation(&k4), rows1(&[&[2, 3, 4], &[1, 3, 4], &[1, 2, 4], &[1, 2, 3]]));
    }

    #[test]
    fn permutation_consistency_examples() {
        assert!(check_permutation_consistent(&consistent_square()).consistent);

        let greedy = greedy_rotation(&square());
        let report = check_permutation_consistent(&greedy);
        assert!(!report.consistent);
        let col0: Vec<_> = report
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::Multiplicity { label: 0, .. }))
            .cloned()
            .collect();
        assert_eq!(col0, vec![
            Violation::Multiplicity { label: 0, vertex: 0, count: 2 },
            Violation::Multiplicity { label: 0, vertex: 1, count: 2 },
            Violation::Multiplicity { label: 0, vertex: 2, count: 0 },
            Violation::Multiplicity { label: 0, vertex: 3, count: 0 },
        ]);

        assert!(check_permutation_consistent(&rows1(&[&[2], &[1]])).consistent);
    }

    #[test]
    fn involution_consistency_examples() {
        let matched = RotationMap::from_columns(&[vec![1, 0, 3, 2], vec![3, 2, 1, 0]]).unwrap();
        assert!(check_involution_consistent(&matched).consistent);

        let report = check_involution_consistent(&consistent_square());
        assert!(!report.consistent);
        assert!(report.violations.contains(&Violation::Unmatched { label: 0, vertex: 0, partner: 1 }));
        assert!(check_permutation_consistent(&consistent_square()).consistent);

        let greedy = greedy_rotation(&square());
        assert!(!check_involution_consistent(&greedy).consistent);
        assert!(!check_permutation_consistent(&greedy).consistent);
    }

    #[test]
    fn validation_examples() {
        let g = square();
        validate_against_graph(&greedy_rotation(&g), &g).unwrap();
        validate_against_graph(&consistent_square(), &g).unwrap();
        let bad = rows1(&[&[3, 4], &[3, 1], &[4, 2], &[1, 3]]);
        match validate_against_graph(&bad, &g).unwrap_err() {
            RotationError::Mismatch(ms) => {
                assert!(ms.contains(&Mismatch { vertex: 0, label: Some(0), entry: Some(2), missing: None }));
            }
            e => panic!("unexpected {e}"),
        }
        let k2 = rows1(&[&[2], &[1]]);
        assert!(matches!(validate_against_graph(&k2, &g), Err(RotationError::Dimension { .. })));
    }

    #[test]
    fn text_format() {
        let greedy = greedy_rotation(&square());
        assert_eq!(greedy.to_text(), "4 2\n2 4\n1 3\n2 4\n1 3\n");
        assert_eq!(parse_rotation("4 2\n2 4\n1 3\n2 4\n1 3").unwrap(), greedy);
        assert_eq!(consistent_square().to_text(), "4 2\n2 4\n3 1\n4 2\n1 3\n");
        assert_eq!(parse_rotation(&consistent_square().to_text()).unwrap(), consistent_square());

        let err = parse_rotation("4 2\n2 2\n1 3\n2 4\n1 3").unwrap_err();
        assert!(matches!(err, RotationError::Format { line: 2, .. }), "{err}");
        assert!(parse_rotation_for("4 2\n3 4\n1 3\n2 4\n1 3", &square()).is_err());
        assert!(parse_rotation("4 2\n2 4\n1 3\n2 4").is_err());
    }

    #[test]
    fn rotate_recovers_return_label() {
        let m = consistent_square();
        // 1 --up--> 2, and 2 lists 1 under "down".
        assert_eq!(m.rotate(0, 0), Some((1, 1)));
        let matched = RotationMap::from_columns(&[vec![1, 0, 3, 2], vec![3, 2, 1, 0]]).unwrap();
        for v in 0..4 {
            for i in 0..2 {
                assert_eq!(matched.rotate(v, i).unwrap().1, i);
            }
        }
    }

    #[test]
    fn inverse_column_composes_to_identity() {
        let m = consistent_square();
        for label in 0..2 {
            let col = m.column(label);
            let inv = m.inverse_column(label).unwrap();
            assert!((0..4).all(|v| inv[col[v]] == v));
        }
        assert!(greedy_rotation(&square()).inverse_column(0).is_none());
    }
}
