//! Edge colorings and the involution criterion.
//!
//! A proper d-edge-coloring of a d-regular graph is the same thing as an
//! involution-consistent rotation map: color class `c` is a perfect matching
//! and `Rot(v, c)` is `v`'s partner in it. Deciding whether one exists is
//! the Class 1 problem, so everything here is either constructive with one
//! spare color (Vizing) or heuristic (local search).

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::RegularGraph;
use crate::rotmap::RotationMap;

const NONE: usize = usize::MAX;

/// A color per edge, edges indexed as in [`RegularGraph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    pub colors: Vec<usize>,
    /// Number of distinct colors used.
    pub num_colors: usize,
}

impl EdgeColoring {
    pub fn is_proper(&self, graph: &RegularGraph) -> bool {
        let edges = graph.edges();
        let width = self.colors.iter().max().map_or(0, |c| c + 1);
        let mut seen = vec![false; graph.n() * width];
        for (&(u, v), &c) in edges.iter().zip(&self.colors) {
            for x in [u, v] {
                if std::mem::replace(&mut seen[x * width + c], true) {
                    return false;
                }
            }
        }
        true
    }

    /// The involution-consistent map of a proper coloring that uses only
    /// colors `0..d`, or `None` otherwise.
    pub fn to_rotation_map(&self, graph: &RegularGraph) -> Option<RotationMap> {
        let d = graph.d();
        if self.colors.iter().any(|&c| c >= d) || !self.is_proper(graph) {
            return None;
        }
        let mut rows = vec![vec![NONE; d]; graph.n()];
        for (&(u, v), &c) in graph.edges().iter().zip(&self.colors) {
            rows[u][c] = v;
            rows[v][c] = u;
        }
        RotationMap::from_rows(&rows).ok()
    }
}

/// Misra–Gries constructive edge coloring with at most `d + 1` colors,
/// followed by a pass that moves edges off the spare color `d` by Kempe
/// interchanges where possible. On bipartite graphs that pass always
/// succeeds, so even cycles and hypercubes come back with `d` colors.
pub fn vizing_color(graph: &RegularGraph) -> EdgeColoring {
    let mut v = Vizing::new(graph);
    v.color_all();
    v.reduce_spare();
    v.finish()
}

struct Vizing<'g> {
    graph: &'g RegularGraph,
    palette: usize,
    edges: Vec<(usize, usize)>,
    color: Vec<usize>,
    /// `at[x * palette + c]` = neighbor joined to `x` by color `c`.
    at: Vec<usize>,
}

impl<'g> Vizing<'g> {
    fn new(graph: &'g RegularGraph) -> Self {
        let palette = graph.d() + 1;
        let edges = graph.edges();
        Self { graph, palette, color: vec![NONE; edges.len()], at: vec![NONE; graph.n() * palette], edges }
    }

    fn edge_id(&self, u: usize, v: usize) -> usize {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.binary_search(&(a, b)).expect("edge exists")
    }

    fn color_of(&self, u: usize, v: usize) -> usize {
        self.color[self.edge_id(u, v)]
    }

    fn is_free(&self, x: usize, c: usize) -> bool {
        self.at[x * self.palette + c] == NONE
    }

    fn free_color(&self, x: usize) -> usize {
        (0..self.palette).find(|&c| self.is_free(x, c)).expect("a vertex of degree d misses one of d+1 colors")
    }

    fn set(&mut self, u: usize, v: usize, c: usize) {
        let e = self.edge_id(u, v);
        let old = self.color[e];
        if old != NONE {
            self.at[u * self.palette + old] = NONE;
            self.at[v * self.palette + old] = NONE;
        }
        self.color[e] = c;
        if c != NONE {
            self.at[u * self.palette + c] = v;
            self.at[v * self.palette + c] = u;
        }
    }

    fn maximal_fan(&self, u: usize, v: usize) -> Vec<usize> {
        let mut fan = vec![v];
        let mut in_fan = vec![false; self.graph.n()];
        in_fan[v] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = self.graph.neighbors(u).iter().copied().find(|&w| {
                if in_fan[w] {
                    return false;
                }
                let c = self.color_of(u, w);
                c != NONE && self.is_free(last, c)
            });
            match next {
                Some(w) => {
                    in_fan[w] = true;
                    fan.push(w);
                }
                None => return fan,
            }
        }
    }

    /// Maximal path from `u` alternating `d, c, d, ...`, as
    /// `(from, to, color)` steps.
    fn alternating_path(&self, u: usize, c: usize, d: usize) -> Vec<(usize, usize, usize)> {
        let mut path = Vec::new();
        let mut x = u;
        let mut want = d;
        loop {
            let y = self.at[x * self.palette + want];
            if y == NONE || path.len() > self.edges.len() {
                return path;
            }
            path.push((x, y, want));
            x = y;
            want = if want == c { d } else { c };
        }
    }

    /// Swaps `c` and `d` along the maximal `c/d` path starting at `u`
    /// (where `c` is free, so the path leaves on a `d` edge).
    fn invert_path(&mut self, u: usize, c: usize, d: usize) {
        let path = self.alternating_path(u, c, d);
        self.swap_path(&path, c, d);
    }

    fn swap_path(&mut self, path: &[(usize, usize, usize)], c: usize, d: usize) {
        for &(a, b, _) in path {
            self.set(a, b, NONE);
        }
        for &(a, b, col) in path {
            self.set(a, b, if col == c { d } else { c });
        }
    }

    fn is_fan(&self, u: usize, fan: &[usize]) -> bool {
        fan.windows(2).all(|w| {
            let c = self.color_of(u, w[1]);
            c != NONE && self.is_free(w[0], c)
        })
    }

    fn color_all(&mut self) {
        for e in 0..self.edges.len() {
            let (u, v) = self.edges[e];
            let fan = self.maximal_fan(u, v);
            let c = self.free_color(u);
            let d = self.free_color(*fan.last().unwrap());
            if c != d {
                self.invert_path(u, c, d);
            }
            let w = (0..fan.len())
                .find(|&i| self.is_free(fan[i], d) && self.is_fan(u, &fan[..=i]))
                .expect("Misra-Gries guarantees a rotatable prefix");
            // Rotate the prefix: each edge takes the color of the next one.
            for i in 0..w {
                let next = self.color_of(u, fan[i + 1]);
                self.set(u, fan[i + 1], NONE);
                self.set(u, fan[i], next);
            }
            self.set(u, fan[w], d);
        }
    }

    /// For each edge `uv` on the spare color, with `a` missing at `u` and
    /// `b` missing at `v` among the regular colors: if the `a/b` path from
    /// `v` does not end at `u`, swapping it frees `a` at both ends.
    fn reduce_spare(&mut self) {
        let spare = self.palette - 1;
        let regular_free = |s: &Self, x: usize| (0..spare).find(|&c| s.is_free(x, c));
        loop {
            let mut progress = false;
            for e in 0..self.edges.len() {
                if self.color[e] != spare {
                    continue;
                }
                let (u, v) = self.edges[e];
                let (Some(a), Some(b)) = (regular_free(self, u), regular_free(self, v)) else {
                    continue;
                };
                let pick = if self.is_free(v, a) {
                    Some(a)
                } else if self.is_free(u, b) {
                    Some(b)
                } else {
                    let from_v = self.alternating_path(v, b, a);
                    if from_v.last().map(|s| s.1) != Some(u) {
                        self.swap_path(&from_v, b, a);
                        Some(a)
                    } else {
                        None
                    }
                };
                if let Some(c) = pick {
                    self.set(u, v, NONE);
                    self.set(u, v, c);
                    progress = true;
                }
            }
            if !progress {
                return;
            }
        }
    }

    fn finish(self) -> EdgeColoring {
        let mut used = vec![false; self.palette];
        for &c in &self.color {
            used[c] = true;
        }
        EdgeColoring { num_colors: used.iter().filter(|&&b| b).count(), colors: self.color }
    }
}

/// Complete d-labeling of the edges with incremental conflict counts.
///
/// The conflict count is `Σ_v Σ_c max(0, k(v, c) − 1)` where `k(v, c)` is
/// the number of edges at `v` labeled `c`; it is zero exactly when the
/// labeling is a proper d-edge-coloring.
#[derive(Debug, Clone)]
pub(crate) struct Labeling {
    d: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    color: Vec<usize>,
    count: Vec<u32>,
    conflicts: usize,
}

impl Labeling {
    fn empty(graph: &RegularGraph) -> Self {
        let edges = graph.edges();
        let mut incident = vec![Vec::with_capacity(graph.d()); graph.n()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(e);
            incident[v].push(e);
        }
        Self {
            d: graph.d(),
            color: vec![NONE; edges.len()],
            count: vec![0; graph.n() * graph.d()],
            edges,
            incident,
            conflicts: 0,
        }
    }

    pub(crate) fn conflicts(&self) -> usize {
        self.conflicts
    }

    fn k(&self, x: usize, c: usize) -> u32 {
        self.count[x * self.d + c]
    }

    /// Conflict change if `e` were relabeled `c`.
    fn delta(&self, e: usize, c: usize) -> isize {
        let old = self.color[e];
        if old == c {
            return 0;
        }
        let (u, v) = self.edges[e];
        let mut delta = 0;
        for x in [u, v] {
            if old != NONE && self.k(x, old) >= 2 {
                delta -= 1;
            }
            if self.k(x, c) >= 1 {
                delta += 1;
            }
        }
        delta
    }

    fn set(&mut self, e: usize, c: usize) {
        let old = self.color[e];
        if old == c {
            return;
        }
        let (u, v) = self.edges[e];
        for x in [u, v] {
            if old != NONE {
                let k = &mut self.count[x * self.d + old];
                if *k >= 2 {
                    self.conflicts -= 1;
                }
                *k -= 1;
            }
            let k = &mut self.count[x * self.d + c];
            if *k >= 1 {
                self.conflicts += 1;
            }
            *k += 1;
        }
        self.color[e] = c;
    }

    fn other(&self, e: usize, x: usize) -> usize {
        let (u, v) = self.edges[e];
        if u == x {
            v
        } else {
            u
        }
    }

    fn vertex_conflicts(&self, x: usize) -> usize {
        (0..self.d).map(|c| self.k(x, c).saturating_sub(1) as usize).sum()
    }

    /// Labels edges in `order`, each with the least-conflict label (lowest
    /// label on ties).
    fn greedy(graph: &RegularGraph, order: &[usize]) -> Self {
        let mut lab = Self::empty(graph);
        for &e in order {
            let c = (0..lab.d).min_by_key(|&c| (lab.delta(e, c), c)).unwrap();
            lab.set(e, c);
        }
        lab
    }

    /// Starts from a Vizing coloring and folds the spare color `d` into the
    /// least-conflict of the regular labels.
    fn from_vizing(graph: &RegularGraph, coloring: &EdgeColoring) -> Self {
        let mut lab = Self::empty(graph);
        let d = lab.d;
        let mut spare = Vec::new();
        for (e, &c) in coloring.colors.iter().enumerate() {
            if c < d {
                lab.set(e, c);
            } else {
                spare.push(e);
            }
        }
        for e in spare {
            let c = (0..d).min_by_key(|&c| (lab.delta(e, c), c)).unwrap();
            lab.set(e, c);
        }
        lab
    }

    pub(crate) fn coloring(&self) -> EdgeColoring {
        let mut used = vec![false; self.d];
        for &c in &self.color {
            used[c] = true;
        }
        EdgeColoring { colors: self.color.clone(), num_colors: used.iter().filter(|&&b| b).count() }
    }

    /// Swaps `a`/`b` along the alternating walk that leaves `v` on edge
    /// `start` (labeled `a`). Returns the edges swapped so the move can be
    /// undone with a second call to [`Labeling::swap_edges`].
    fn kempe_chain(&self, v: usize, start: usize, a: usize, b: usize, mark: &mut [u32], stamp: u32) -> Vec<usize> {
        let mut chain = vec![start];
        mark[start] = stamp;
        let mut x = self.other(start, v);
        let mut want = b;
        loop {
            let next = self.incident[x].iter().copied().find(|&e| self.color[e] == want && mark[e] != stamp);
            match next {
                Some(e) => {
                    mark[e] = stamp;
                    chain.push(e);
                    x = self.other(e, x);
                    want = if want == a { b } else { a };
                }
                None => return chain,
            }
        }
    }

    fn swap_edges(&mut self, chain: &[usize], a: usize, b: usize) {
        for &e in chain {
            let c = if self.color[e] == a { b } else { a };
            self.set(e, c);
        }
    }
}

/// Budget and bookkeeping shared by the coloring heuristics.
pub(crate) struct SearchLimits {
    pub max_iterations: usize,
    pub max_restarts: usize,
    pub deadline: Option<Instant>,
}

pub(crate) struct SearchResult {
    pub best: Labeling,
    pub iterations: u64,
    pub restarts: usize,
    pub trace: Vec<usize>,
}

/// Random-order greedy labelings; restart 0 uses edge index order.
pub(crate) fn greedy_restarts(graph: &RegularGraph, limits: &SearchLimits, rng: &mut ChaCha8Rng) -> SearchResult {
    let mut order: Vec<usize> = (0..graph.edge_count()).collect();
    let mut best: Option<Labeling> = None;
    let mut trace = Vec::new();
    let mut restarts = 0;
    for r in 0..limits.max_restarts.max(1) {
        if r > 0 {
            if limits.deadline.is_some_and(|t| Instant::now() >= t) {
                break;
            }
            order.shuffle(rng);
        }
        restarts += 1;
        let lab = Labeling::greedy(graph, &order);
        trace.push(lab.conflicts());
        if best.as_ref().map_or(true, |b| lab.conflicts() < b.conflicts()) {
            best = Some(lab);
        }
        if best.as_ref().unwrap().conflicts() == 0 {
            break;
        }
    }
    SearchResult { best: best.unwrap(), iterations: restarts as u64, restarts, trace }
}

/// Local search over complete d-labelings.
///
/// Each iteration picks a conflicted vertex `v`, a label `a` repeated at `v`
/// and a label `b` missing at `v`, and tries the Kempe swap along the `a/b`
/// walk leaving `v`; the first strictly improving swap is kept. When none
/// improves, one edge at `v` is relabeled by the best non-tabu move
/// (possibly uphill). Restart 0 starts from the Vizing coloring, later
/// restarts from random greedy labelings.
pub(crate) fn local_search(graph: &RegularGraph, limits: &SearchLimits, rng: &mut ChaCha8Rng) -> SearchResult {
    let d = graph.d();
    let m = graph.edge_count();
    let mut order: Vec<usize> = (0..m).collect();
    let mut best: Option<Labeling> = None;
    let mut trace = Vec::new();
    let mut iterations = 0u64;
    let mut restarts = 0;
    let mut mark = vec![0u32; m];
    let mut stamp = 0u32;
    let mut tabu = vec![0u64; m * d];

    'restarts: for r in 0..limits.max_restarts.max(1) {
        let mut lab = if r == 0 {
            Labeling::from_vizing(graph, &vizing_color(graph))
        } else {
            order.shuffle(rng);
            Labeling::greedy(graph, &order)
        };
        restarts += 1;
        tabu.iter_mut().for_each(|t| *t = 0);
        let mut restart_best = lab.conflicts();
        if best.as_ref().map_or(true, |b| lab.conflicts() < b.conflicts()) {
            best = Some(lab.clone());
        }

        for it in 0..limits.max_iterations as u64 {
            if lab.conflicts() == 0 {
                break 'restarts;
            }
            if it % 256 == 0 && limits.deadline.is_some_and(|t| Instant::now() >= t) {
                break 'restarts;
            }
            iterations += 1;

            let conflicted: Vec<usize> = (0..graph.n()).filter(|&x| lab.vertex_conflicts(x) > 0).collect();
            let v = conflicted[rng.gen_range(0..conflicted.len())];
            let repeated: Vec<usize> = (0..d).filter(|&c| lab.k(v, c) >= 2).collect();
            let missing: Vec<usize> = (0..d).filter(|&c| lab.k(v, c) == 0).collect();

            let mut improved = false;
            'kempe: for &a in &repeated {
                for &b in &missing {
                    for i in 0..lab.incident[v].len() {
                        let e = lab.incident[v][i];
                        if lab.color[e] != a {
                            continue;
                        }
                        stamp = stamp.wrapping_add(1);
                        if stamp == 0 {
                            mark.iter_mut().for_each(|s| *s = 0);
                            stamp = 1;
                        }
                        let chain = lab.kempe_chain(v, e, a, b, &mut mark, stamp);
                        let before = lab.conflicts();
                        lab.swap_edges(&chain, a, b);
                        if lab.conflicts() < before {
                            improved = true;
                            break 'kempe;
                        }
                        lab.swap_edges(&chain, a, b);
                    }
                }
            }

            if !improved {
                let mut pick: Option<(isize, usize, usize)> = None;
                let mut ties = 0u32;
                for &e in &lab.incident[v] {
                    if lab.k(v, lab.color[e]) < 2 {
                        continue;
                    }
                    for c in 0..d {
                        if c == lab.color[e] {
                            continue;
                        }
                        let delta = lab.delta(e, c);
                        let aspirates = (lab.conflicts() as isize + delta) < restart_best as isize;
                        if tabu[e * d + c] > it && !aspirates {
                            continue;
                        }
                        match pick {
                            Some((bd, _, _)) if delta > bd => {}
                            Some((bd, _, _)) if delta == bd => {
                                ties += 1;
                                if rng.gen_range(0..=ties) == 0 {
                                    pick = Some((delta, e, c));
                                }
                            }
                            _ => {
                                pick = Some((delta, e, c));
                                ties = 0;
                            }
                        }
                    }
                }
                if let Some((_, e, c)) = pick {
                    let old = lab.color[e];
                    lab.set(e, c);
                    tabu[e * d + old] = it + 5 + rng.gen_range(0..10) as u64;
                }
            }

            trace.push(lab.conflicts());
            if lab.conflicts() < restart_best {
                restart_best = lab.conflicts();
            }
            if best.as_ref().map_or(true, |b| lab.conflicts() < b.conflicts()) {
                best = Some(lab.clone());
            }
        }
    }
    SearchResult { best: best.unwrap(), iterations, restarts, trace }
}
