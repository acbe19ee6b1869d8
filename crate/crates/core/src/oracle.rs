//! Independent exact computations used to certify every constructive result:
//! clique number, k-colorability, chromatic number, optimal coloring of
//! P4-free graphs, and maximum bipartite matching. All integral, all
//! deterministic. The coloring searches accept a node budget so callers can
//! bound worst-case work with a clean failure mode.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};
use crate::patterns::components_within;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("node budget exceeded after {nodes} search nodes")]
    BudgetExceeded { nodes: u64 },
    #[error("exact coloring solver supports at most {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("input graph is not P4-free")]
    NotP4Free,
}

/// Cap for the exact coloring solver's color-mask width.
const MAX_SOLVER_VERTICES: usize = 128;

/// Node budget for exact searches. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeBudget(pub Option<u64>);

impl NodeBudget {
    pub const UNLIMITED: NodeBudget = NodeBudget(None);

    pub fn limited(nodes: u64) -> NodeBudget {
        NodeBudget(Some(nodes))
    }
}

/// A vertex → color assignment. Colors are positive integers drawn from
/// `1..=palette_size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    colors: Vec<u32>,
    palette_size: u32,
}

impl Coloring {
    pub fn new(colors: Vec<u32>, palette_size: u32) -> Coloring {
        debug_assert!(colors.iter().all(|&c| c >= 1 && c <= palette_size));
        Coloring { colors, palette_size }
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_of(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn palette_size(&self) -> u32 {
        self.palette_size
    }

    /// Number of distinct colors actually used.
    pub fn colors_used(&self) -> u32 {
        let mut seen = vec![false; self.palette_size as usize + 1];
        let mut count = 0;
        for &c in &self.colors {
            if !seen[c as usize] {
                seen[c as usize] = true;
                count += 1;
            }
        }
        count
    }

    pub fn max_color(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    /// Edge-by-edge properness check.
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.first_conflict(g).is_none()
    }

    /// First monochromatic edge in lexicographic order, if any.
    pub fn first_conflict(&self, g: &Graph) -> Option<(usize, usize)> {
        g.edges().find(|&(u, v)| self.colors[u] == self.colors[v])
    }
}

// ---------------------------------------------------------------------------
// Maximum clique: branch and bound with a greedy-coloring upper bound.
// ---------------------------------------------------------------------------

/// Exact clique number with a witness clique.
pub fn clique_number(g: &Graph) -> (usize, VertexSet) {
    let n = g.n();
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let p = g.vertex_set();
    expand_clique(g, &p, &mut current, &mut best);
    let _ = n;
    let size = best.len();
    (size, VertexSet::from_vertices(g.n(), &best))
}

/// Greedy color classes over `p`; returns candidates with their class index
/// (1-based) in discovery order. The class index bounds the clique size
/// reachable through that candidate.
fn greedy_color_order(g: &Graph, p: &VertexSet) -> Vec<(usize, usize)> {
    let mut remaining = p.clone();
    let mut out = Vec::with_capacity(p.len());
    let mut color = 0;
    while !remaining.is_empty() {
        color += 1;
        let mut q = remaining.clone();
        while let Some(v) = q.min() {
            out.push((v, color));
            remaining.remove(v);
            q.remove(v);
            q.subtract(&g.neighbors(v).expect("in range"));
        }
    }
    out
}

fn expand_clique(g: &Graph, p: &VertexSet, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if p.is_empty() {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    let mut order = greedy_color_order(g, p);
    let mut p = p.clone();
    while let Some((v, bound)) = order.pop() {
        if current.len() + bound <= best.len() {
            return;
        }
        current.push(v);
        let next = p.intersection(&g.neighbors(v).expect("in range"));
        expand_clique(g, &next, current, best);
        current.pop();
        p.remove(v);
    }
}

// ---------------------------------------------------------------------------
// Exact k-colorability: DSATUR vertex selection, colors introduced in order,
// and a maximum clique pre-colored 1..ω to break palette symmetry.
// ---------------------------------------------------------------------------

struct ColorSearch<'a> {
    g: &'a Graph,
    k: u32,
    colors: Vec<u32>, // 0 = uncolored
    // per-vertex count of neighbors holding each color (1-based index)
    neighbor_counts: Vec<Vec<u16>>,
    // per-vertex bitmask of colors present among neighbors
    neighbor_mask: Vec<u128>,
    degrees: Vec<usize>,
    uncolored: usize,
    nodes: u64,
    limit: Option<u64>,
}

impl<'a> ColorSearch<'a> {
    fn new(g: &'a Graph, k: u32, limit: Option<u64>) -> ColorSearch<'a> {
        let n = g.n();
        ColorSearch {
            g,
            k,
            colors: vec![0; n],
            neighbor_counts: vec![vec![0; k as usize + 1]; n],
            neighbor_mask: vec![0; n],
            degrees: (0..n).map(|v| g.degree(v)).collect(),
            uncolored: n,
            nodes: 0,
            limit,
        }
    }

    fn assign(&mut self, v: usize, c: u32) {
        self.colors[v] = c;
        self.uncolored -= 1;
        for u in self.g.neighbors(v).expect("in range").iter() {
            self.neighbor_counts[u][c as usize] += 1;
            self.neighbor_mask[u] |= 1u128 << (c - 1);
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v];
        self.colors[v] = 0;
        self.uncolored += 1;
        for u in self.g.neighbors(v).expect("in range").iter() {
            self.neighbor_counts[u][c as usize] -= 1;
            if self.neighbor_counts[u][c as usize] == 0 {
                self.neighbor_mask[u] &= !(1u128 << (c - 1));
            }
        }
    }

    /// Uncolored vertex with maximum saturation, ties by degree then least
    /// index.
    fn select(&self) -> usize {
        let mut best = usize::MAX;
        let mut best_key = (0usize, 0usize);
        for v in 0..self.colors.len() {
            if self.colors[v] != 0 {
                continue;
            }
            let sat = self.neighbor_mask[v].count_ones() as usize;
            let key = (sat, self.degrees[v]);
            if best == usize::MAX || key > best_key {
                best = v;
                best_key = key;
            }
        }
        best
    }

    fn solve(&mut self, max_used: u32) -> Result<bool, OracleError> {
        if self.uncolored == 0 {
            return Ok(true);
        }
        let v = self.select();
        let cap = self.k.min(max_used + 1);
        for c in 1..=cap {
            if self.neighbor_mask[v] >> (c - 1) & 1 == 1 {
                continue;
            }
            self.nodes += 1;
            if let Some(limit) = self.limit {
                if self.nodes > limit {
                    return Err(OracleError::BudgetExceeded { nodes: self.nodes });
                }
            }
            self.assign(v, c);
            if self.solve(max_used.max(c))? {
                return Ok(true);
            }
            self.unassign(v);
        }
        Ok(false)
    }
}

/// Decides k-colorability exactly. Returns a proper coloring with at most
/// `k` colors, or `None` when no such coloring exists.
pub fn is_k_colorable(g: &Graph, k: u32, budget: NodeBudget) -> Result<Option<Coloring>, OracleError> {
    let (_, clique) = clique_number(g);
    is_k_colorable_seeded(g, k, &clique, budget)
}

/// As [`is_k_colorable`], reusing an already-computed clique as the
/// symmetry-breaking seed. Any clique of `g` is sound here.
pub fn is_k_colorable_seeded(
    g: &Graph,
    k: u32,
    clique: &VertexSet,
    budget: NodeBudget,
) -> Result<Option<Coloring>, OracleError> {
    let n = g.n();
    if n == 0 {
        return Ok(Some(Coloring::new(Vec::new(), k)));
    }
    if n > MAX_SOLVER_VERTICES {
        return Err(OracleError::TooLarge {
            n,
            max: MAX_SOLVER_VERTICES,
        });
    }
    if clique.len() as u32 > k {
        return Ok(None);
    }
    if k == 0 {
        return Ok(None); // n >= 1 here
    }
    let k_eff = k.min(n as u32);
    let mut search = ColorSearch::new(g, k_eff, budget.0);
    let mut max_used = 0;
    for (i, v) in clique.iter().enumerate() {
        search.assign(v, i as u32 + 1);
        max_used = i as u32 + 1;
    }
    if search.solve(max_used)? {
        let coloring = Coloring::new(search.colors, k);
        debug_assert!(coloring.is_proper(g));
        Ok(Some(coloring))
    } else {
        Ok(None)
    }
}

/// Greedy DSATUR heuristic; proper but not necessarily optimal. Used as an
/// upper bound and for quick colorings.
pub fn dsatur_greedy(g: &Graph) -> Coloring {
    let n = g.n();
    let mut colors = vec![0u32; n];
    let mut neighbor_mask: Vec<u128> = vec![0; n];
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut best_key = (0usize, 0usize);
        for v in 0..n {
            if colors[v] != 0 {
                continue;
            }
            let key = (neighbor_mask[v].count_ones() as usize, degrees[v]);
            if best == usize::MAX || key > best_key {
                best = v;
                best_key = key;
            }
        }
        let c = (1..).find(|&c| neighbor_mask[best] >> (c - 1) & 1 == 0).unwrap();
        colors[best] = c;
        for u in g.neighbors(best).expect("in range").iter() {
            neighbor_mask[u] |= 1u128 << (c - 1);
        }
    }
    let palette = colors.iter().copied().max().unwrap_or(0);
    Coloring::new(colors, palette)
}

/// Exact chromatic number with a certifying coloring. Starts from the clique
/// lower bound and the DSATUR-greedy upper bound; each intermediate `k` is
/// refuted by exhaustive search before `k+1` is tried.
pub fn chromatic_number(g: &Graph, budget: NodeBudget) -> Result<(u32, Coloring), OracleError> {
    let n = g.n();
    if n == 0 {
        return Ok((0, Coloring::new(Vec::new(), 0)));
    }
    let (omega, clique) = clique_number(g);
    let greedy = dsatur_greedy(g);
    let ub = greedy.max_color();
    if omega as u32 == ub {
        return Ok((ub, greedy));
    }
    for k in omega as u32..ub {
        if let Some(coloring) = is_k_colorable_seeded(g, k, &clique, budget)? {
            assert!(coloring.is_proper(g), "oracle produced an improper coloring");
            return Ok((k, coloring));
        }
    }
    Ok((ub, greedy))
}

// ---------------------------------------------------------------------------
// Optimal coloring of P4-free graphs through the cotree: color counts
// combine by max under disjoint union and by sum under join.
// ---------------------------------------------------------------------------

/// Colors a P4-free graph with exactly ω(g) colors.
pub fn cograph_optimal_coloring(g: &Graph) -> Result<Coloring, OracleError> {
    let n = g.n();
    let mut colors = vec![0u32; n];
    let all = g.vertex_set();
    let used = if n == 0 {
        0
    } else {
        cotree_color(g, &all, 0, &mut colors)?
    };
    let coloring = Coloring::new(colors, used.max(if n == 0 { 0 } else { 1 }));
    debug_assert!(coloring.is_proper(g));
    Ok(coloring)
}

fn cotree_color(g: &Graph, s: &VertexSet, base: u32, out: &mut [u32]) -> Result<u32, OracleError> {
    if s.len() == 1 {
        out[s.min().unwrap()] = base + 1;
        return Ok(1);
    }
    let comps = components_within(g, s, false);
    if comps.len() > 1 {
        let mut max_used = 0;
        for c in &comps {
            max_used = max_used.max(cotree_color(g, c, base, out)?);
        }
        return Ok(max_used);
    }
    let cocomps = components_within(g, s, true);
    if cocomps.len() > 1 {
        let mut acc = 0;
        for c in &cocomps {
            acc += cotree_color(g, c, base + acc, out)?;
        }
        return Ok(acc);
    }
    Err(OracleError::NotP4Free)
}

// ---------------------------------------------------------------------------
// Maximum bipartite matching (Hopcroft–Karp).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingResult {
    /// Matched (left, right) pairs, sorted by left vertex.
    pub pairs: Vec<(usize, usize)>,
    /// Whether every left vertex is matched.
    pub saturates_left: bool,
}

/// Maximum-cardinality matching in the bipartite graph with parts
/// `0..left_size` and `0..right_size` and the given edges.
pub fn max_bipartite_matching(
    left_size: usize,
    right_size: usize,
    edges: &[(usize, usize)],
) -> MatchingResult {
    for &(u, v) in edges {
        assert!(u < left_size && v < right_size, "edge ({u},{v}) out of range");
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); left_size];
    for &(u, v) in edges {
        adj[u].push(v);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }

    const NIL: usize = usize::MAX;
    let mut match_left = vec![NIL; left_size];
    let mut match_right = vec![NIL; right_size];

    loop {
        // BFS phase: distances over free left vertices
        let mut dist = vec![u32::MAX; left_size];
        let mut queue: std::collections::VecDeque<usize> = (0..left_size)
            .filter(|&u| match_left[u] == NIL)
            .inspect(|&u| dist[u] = 0)
            .collect();
        let mut found_augmenting = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_right[v] {
                    NIL => found_augmenting = true,
                    w if dist[w] == u32::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found_augmenting {
            break;
        }
        // DFS phase: vertex-disjoint shortest augmenting paths
        fn try_augment(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [u32],
            match_left: &mut [usize],
            match_right: &mut [usize],
        ) -> bool {
            for i in 0..adj[u].len() {
                let v = adj[u][i];
                let w = match_right[v];
                if w == NIL
                    || (dist[w] == dist[u] + 1 && try_augment(w, adj, dist, match_left, match_right))
                {
                    match_left[u] = v;
                    match_right[v] = u;
                    return true;
                }
            }
            dist[u] = u32::MAX;
            false
        }
        for u in 0..left_size {
            if match_left[u] == NIL && dist[u] == 0 {
                try_augment(u, &adj, &mut dist, &mut match_left, &mut match_right);
            }
        }
    }

    let pairs: Vec<(usize, usize)> = match_left
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != NIL)
        .map(|(u, &v)| (u, v))
        .collect();
    let saturates_left = pairs.len() == left_size;
    MatchingResult { pairs, saturates_left }
}
