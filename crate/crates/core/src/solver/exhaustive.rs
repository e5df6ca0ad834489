//! Complete backtracking for small instances.
//!
//! Labels are interchangeable, so the labels at the first vertex are fixed
//! in ascending neighbor order; every consistent map is a label permutation
//! of one with that property. With that pruning the search is complete:
//! failure proves that no consistent map exists.

use crate::graph::RegularGraph;
use crate::rotmap::RotationMap;

pub(crate) struct SearchTrace {
    pub map: Option<RotationMap>,
    pub nodes: u64,
}

/// Proper d-edge-coloring search (involution criterion).
pub(crate) fn involution(graph: &RegularGraph) -> SearchTrace {
    let (n, d) = (graph.n(), graph.d());
    // Edges in breadth-first order from vertex 0, so that consecutive
    // edges share endpoints and conflicts surface early.
    let mut order = Vec::with_capacity(graph.edge_count());
    let mut seen_vertex = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen_vertex[0] = true;
    let all_edges = graph.edges();
    let mut placed = vec![false; all_edges.len()];
    while let Some(u) = queue.pop_front() {
        for &w in graph.neighbors(u) {
            let e = all_edges.binary_search(&(u.min(w), u.max(w))).unwrap();
            if !placed[e] {
                placed[e] = true;
                order.push(e);
            }
            if !seen_vertex[w] {
                seen_vertex[w] = true;
                queue.push_back(w);
            }
        }
    }
    // Disconnected graphs: append the remaining edges.
    order.extend((0..all_edges.len()).filter(|&e| !placed[e]));

    let mut used = vec![0u64; n];
    let mut color = vec![usize::MAX; all_edges.len()];
    // Vertex 0's edges come first in the order; pin them to 0..d.
    for (c, &e) in order[..d].iter().enumerate() {
        let (u, v) = all_edges[e];
        used[u] |= 1 << c;
        used[v] |= 1 << c;
        color[e] = c;
    }
    let mut nodes = 0;
    let found = color_rec(&all_edges, &order, d, d, &mut used, &mut color, &mut nodes);
    let map = found.then(|| {
        let mut rows = vec![vec![0; d]; n];
        for (&(u, v), &c) in all_edges.iter().zip(&color) {
            rows[u][c] = v;
            rows[v][c] = u;
        }
        RotationMap::from_rows(&rows).expect("proper coloring yields valid rows")
    });
    SearchTrace { map, nodes }
}

fn color_rec(
    edges: &[(usize, usize)],
    order: &[usize],
    pos: usize,
    d: usize,
    used: &mut [u64],
    color: &mut [usize],
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    if pos == order.len() {
        return true;
    }
    let e = order[pos];
    let (u, v) = edges[e];
    let free = !(used[u] | used[v]);
    for c in 0..d {
        if free & (1 << c) == 0 {
            continue;
        }
        used[u] |= 1 << c;
        used[v] |= 1 << c;
        color[e] = c;
        if color_rec(edges, order, pos + 1, d, used, color, nodes) {
            return true;
        }
        used[u] &= !(1 << c);
        used[v] &= !(1 << c);
        color[e] = usize::MAX;
    }
    false
}

/// Row-by-row assignment with every column kept injective (permutation
/// criterion).
pub(crate) fn permutation(graph: &RegularGraph) -> SearchTrace {
    let (n, d) = (graph.n(), graph.d());
    let mut rows = vec![vec![usize::MAX; d]; n];
    let mut column_used = vec![0u64; d];
    for (i, &w) in graph.neighbors(0).iter().enumerate() {
        rows[0][i] = w;
        column_used[i] |= 1 << w;
    }
    let mut nodes = 0;
    let found = perm_rec(graph, 1, 0, 0, &mut rows, &mut column_used, &mut nodes);
    let map = found.then(|| RotationMap::from_rows(&rows).expect("search keeps rows distinct"));
    SearchTrace { map, nodes }
}

fn perm_rec(
    graph: &RegularGraph,
    v: usize,
    label: usize,
    row_used: u64,
    rows: &mut [Vec<usize>],
    column_used: &mut [u64],
    nodes: &mut u64,
) -> bool {
    *nodes += 1;
    let d = graph.d();
    if v == graph.n() {
        return true;
    }
    if label == d {
        return perm_rec(graph, v + 1, 0, 0, rows, column_used, nodes);
    }
    for (k, &w) in graph.neighbors(v).iter().enumerate() {
        if row_used & (1 << k) != 0 || column_used[label] & (1 << w) != 0 {
            continue;
        }
        rows[v][label] = w;
        column_used[label] |= 1 << w;
        if perm_rec(graph, v, label + 1, row_used | (1 << k), rows, column_used, nodes) {
            return true;
        }
        column_used[label] &= !(1 << w);
    }
    rows[v][label] = usize::MAX;
    false
}
