//! Independent reference computations for the integration tests.
//!
//! Nothing here goes through the sparse operator code: shifts are built as
//! dense complex matrices straight from the rotation-map entries, coins are
//! extended by an explicit Kronecker product, and consistency is decided by
//! sorting columns.

#![allow(dead_code)]

use num_complex::Complex64;
use rotwalk::graph::RegularGraph;
use rotwalk::RotationMap;

pub type Dense = Vec<Vec<Complex64>>;

pub fn zeros(dim: usize) -> Dense {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

/// `Σ_j Σ_v |c_j⟩⟨c_j| ⊗ |Rot(v, j)⟩⟨v|` as a dense matrix, coin-major.
pub fn dense_shift(rot: &RotationMap) -> Dense {
    let (n, d) = (rot.n(), rot.d());
    let mut s = zeros(n * d);
    for j in 0..d {
        for v in 0..n {
            // |c_j⟩⟨c_j| ⊗ |w⟩⟨v| has a single 1 at (j·n + w, j·n + v).
            s[j * n + rot.get(v, j)][j * n + v] += Complex64::new(1.0, 0.0);
        }
    }
    s
}

/// `C ⊗ I_n` as a dense matrix.
pub fn kron_coin(coin: &[Vec<Complex64>], n: usize) -> Dense {
    let d = coin.len();
    let mut m = zeros(n * d);
    for j in 0..d {
        for k in 0..d {
            for v in 0..n {
                m[j * n + v][k * n + v] = coin[j][k];
            }
        }
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let dim = a.len();
    let mut c = zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn adjoint(a: &Dense) -> Dense {
    let dim = a.len();
    (0..dim).map(|i| (0..dim).map(|j| a[j][i].conj()).collect()).collect()
}

pub fn matvec(a: &Dense, x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

pub fn max_abs_minus_identity(a: &Dense) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x - target).norm());
        }
    }
    worst
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Per-vertex probabilities of a coin-major vector.
pub fn vertex_probabilities(x: &[Complex64], n: usize) -> Vec<f64> {
    (0..n).map(|v| (0..x.len() / n).map(|j| x[j * n + v].norm_sqr()).sum()).collect()
}

/// Dense walk: `t` applications of `S·(C ⊗ I)`, returning every state.
pub fn dense_walk(rot: &RotationMap, coin: &[Vec<Complex64>], init: &[Complex64], t: usize) -> Vec<Vec<Complex64>> {
    let u = matmul(&dense_shift(rot), &kron_coin(coin, rot.n()));
    let mut states = vec![init.to_vec()];
    for _ in 0..t {
        let next = matvec(&u, states.last().unwrap());
        states.push(next);
    }
    states
}

pub fn hadamard() -> Vec<Vec<Complex64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)], vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]]
}

pub fn identity(d: usize) -> Vec<Vec<Complex64>> {
    (0..d).map(|i| (0..d).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect()).collect()
}

/// Permutation consistency by sorting each column and comparing with `0..n`.
pub fn sorted_columns_consistent(rot: &RotationMap) -> bool {
    (0..rot.d()).all(|j| {
        let mut col = rot.column(j);
        col.sort_unstable();
        col.iter().enumerate().all(|(i, &w)| i == w)
    })
}

/// `S·S†` computed entrywise from the map: entry `(r, r')` counts the
/// basis states sent to both `r` and `r'`.
pub fn integer_product(rot: &RotationMap) -> Vec<Vec<i64>> {
    let (n, d) = (rot.n(), rot.d());
    let dim = n * d;
    let mut s = vec![vec![0i64; dim]; dim];
    for j in 0..d {
        for v in 0..n {
            s[j * n + rot.get(v, j)][j * n + v] = 1;
        }
    }
    (0..dim).map(|r| (0..dim).map(|q| (0..dim).map(|c| s[r][c] * s[q][c]).sum()).collect()).collect()
}

pub fn degree_counts(adj: &[Vec<bool>]) -> Vec<usize> {
    adj.iter().map(|r| r.iter().filter(|&&a| a).count()).collect()
}

/// Every labeled simple d-regular graph on `n` vertices, by edge subsets.
/// Only sensible for `n <= 6`.
pub fn all_regular_graphs(n: usize, d: usize) -> Vec<RegularGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let m = n * d / 2;
    let mut out = Vec::new();
    if n * d % 2 == 1 {
        return out;
    }
    for mask in 0u64..(1 << pairs.len()) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let mut deg = vec![0; n];
        let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        if deg.iter().all(|&x| x == d) {
            out.push(RegularGraph::from_edges(n, &edges).unwrap());
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Every rotation map of `graph`: each row independently any ordering of
/// the vertex's neighbors.
pub fn all_rotation_maps(graph: &RegularGraph) -> Vec<RotationMap> {
    let row_choices: Vec<Vec<Vec<usize>>> = (0..graph.n()).map(|v| permutations(graph.neighbors(v))).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; graph.n()];
    loop {
        let rows: Vec<Vec<usize>> = idx.iter().enumerate().map(|(v, &i)| row_choices[v][i].clone()).collect();
        out.push(RotationMap::from_rows(&rows).unwrap());
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < row_choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub const PETERSEN: &str = "\
# outer 5-cycle, spokes, inner pentagram
10 3
1 2
2 3
3 4
4 5
1 5
1 6
2 7
3 8
4 9
5 10
6 8
8 10
7 10
7 9
6 9
";
