//! Permutation-consistent maps from perfect matchings.
//!
//! Take a left and a right copy of the vertex set and join `v` to `w`
//! whenever `v ~ w`. That bipartite graph is d-regular, so it has a perfect
//! matching; removing it leaves a (d-1)-regular bipartite graph, and so on.
//! The `j`-th matching, read as `v -> w`, is a bijection and becomes column
//! `j` of the map. Each row uses every neighbor exactly once because every
//! arc lands in exactly one matching.

use std::collections::VecDeque;

use crate::graph::RegularGraph;
use crate::rotmap::RotationMap;

const NONE: usize = usize::MAX;

/// Maximum matching in a bipartite graph with `adj[left] = right
/// neighbors`. Returns `mate[left]` (`usize::MAX` if unmatched).
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<usize> {
    let left = adj.len();
    let mut mate_l = vec![NONE; left];
    let mut mate_r = vec![NONE; right];
    let mut dist = vec![0usize; left];
    let mut queue = VecDeque::with_capacity(left);

    loop {
        // Layer the free left vertices and everything reachable by
        // alternating paths.
        queue.clear();
        for u in 0..left {
            if mate_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NONE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                let m = mate_r[w];
                if m == NONE {
                    found = true;
                } else if dist[m] == NONE {
                    dist[m] = dist[u] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        let mut cursor = vec![0usize; left];
        for u in 0..left {
            if mate_l[u] == NONE && augment(u, adj, &mut mate_l, &mut mate_r, &mut dist, &mut cursor) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    mate_l
}

/// Iterative layered DFS for one augmenting path from free vertex `root`.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if cursor[u] == adj[u].len() {
            dist[u] = NONE;
            stack.pop();
            continue;
        }
        let w = adj[u][cursor[u]];
        let m = mate_r[w];
        if m == NONE {
            // Flip the path recorded on the stack.
            for &x in stack.iter().rev() {
                let y = adj[x][cursor[x]];
                mate_l[x] = y;
                mate_r[y] = x;
            }
            for &x in stack.iter() {
                cursor[x] += 1;
            }
            return true;
        }
        if dist[m] != NONE && dist[m] == dist[u] + 1 {
            stack.push(m);
        } else {
            cursor[u] += 1;
        }
    }
    false
}

/// Peels `d` perfect matchings off the bipartite arc graph. Returns the
/// columns of the map, or the round at which no perfect matching was found
/// (which cannot happen for a regular graph).
pub(crate) fn matching_columns(graph: &RegularGraph) -> Result<Vec<Vec<usize>>, usize> {
    let n = graph.n();
    let mut remaining: Vec<Vec<usize>> = (0..n).map(|v| graph.neighbors(v).to_vec()).collect();
    let mut columns = Vec::with_capacity(graph.d());
    for round in 0..graph.d() {
        let mate = hopcroft_karp(&remaining, n);
        if mate.iter().any(|&w| w == NONE) {
            return Err(round);
        }
        for (v, &w) in mate.iter().enumerate() {
            let pos = remaining[v].iter().position(|&x| x == w).expect("matched along an existing arc");
            remaining[v].remove(pos);
        }
        columns.push(mate);
    }
    Ok(columns)
}

pub(crate) fn matching_map(graph: &RegularGraph) -> Result<RotationMap, usize> {
    let cols = matching_columns(graph)?;
    Ok(RotationMap::from_columns(&cols).expect("matchings give distinct row entries"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_max_matching(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &w in &adj[u] {
                if !used[w] {
                    used[w] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[w] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let left = rng.gen_range(1..7);
            let right = rng.gen_range(1..7);
            let adj: Vec<Vec<usize>> =
                (0..left).map(|_| (0..right).filter(|_| rng.gen_bool(0.4)).collect()).collect();
            let mate = hopcroft_karp(&adj, right);
            let size = mate.iter().filter(|&&w| w != NONE).count();
            assert_eq!(size, brute_max_matching(&adj, right), "{adj:?}");
            let mut seen = vec![false; right];
            for (u, &w) in mate.iter().enumerate() {
                if w != NONE {
                    assert!(adj[u].contains(&w));
                    assert!(!std::mem::replace(&mut seen[w], true));
                }
            }
        }
    }
}
