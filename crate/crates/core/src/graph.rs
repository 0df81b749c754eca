//! Simple undirected graphs with stable edge ids, family generators and
//! truncated-BFS distance queries.
//!
//! Edge ids are assigned in input order and are the canonical handle
//! everywhere in this crate: colourings are maps keyed by edge id, so the
//! numbering must be stable across runs and across serialisation.

use std::collections::BTreeMap;

use num::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Default ceiling on edge counts for generated or ingested graphs.
/// Exceeding the cap is an error, never silent truncation.
pub const DEFAULT_EDGE_CAP: usize = 5_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge list is empty")]
    EmptyGraph,
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
    #[error("no {d}-regular graph on {n} vertices: need n·d even and d < n")]
    InfeasibleRegular { n: u32, d: u32 },
    #[error("construction refused, size cap exceeded: {0}")]
    SizeCap(String),
}

/// Simple undirected graph. Vertices are `0..n`, edges are indexed in input
/// order and referenced by that index (the edge id) throughout.
#[derive(Debug, Clone)]
pub struct Graph {
    n: u32,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<(u32, u32)>>,
    max_degree: u32,
    min_degree: u32,
}

impl Graph {
    /// Build a graph from an explicit edge list; the vertex count is the
    /// largest id mentioned plus one.
    pub fn from_edges(edge_list: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let n = edge_list
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .ok_or(GraphError::EmptyGraph)?;
        Graph::from_edges_with_n(n, edge_list)
    }

    /// Build a graph on exactly `n` vertices (ids beyond the edge list are
    /// isolated vertices, which the file format permits).
    pub fn from_edges_with_n(n: u32, edge_list: &[(u32, u32)]) -> Result<Graph, GraphError> {
        if edge_list.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adjacency = vec![Vec::new(); n as usize];
        let mut seen = std::collections::HashSet::with_capacity(edge_list.len());
        for (id, &(u, v)) in edge_list.iter().enumerate() {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            assert!(u < n && v < n, "vertex id out of declared range");
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            edges.push(key);
            let id = id as u32;
            adjacency[u as usize].push((v, id));
            adjacency[v as usize].push((u, id));
        }
        let degrees: Vec<u32> = adjacency.iter().map(|a| a.len() as u32).collect();
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let min_degree = degrees.iter().copied().min().unwrap_or(0);
        Ok(Graph {
            n,
            edges,
            adjacency,
            max_degree,
            min_degree,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints of an edge, lower id first.
    pub fn endpoints(&self, edge: u32) -> (u32, u32) {
        self.edges[edge as usize]
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// `(neighbour, edge id)` pairs of `v` in insertion order.
    pub fn adjacency(&self, v: u32) -> &[(u32, u32)] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.adjacency[v as usize].len() as u32
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn min_degree(&self) -> u32 {
        self.min_degree
    }

    /// The edge joining `u` and `v`, if present.
    pub fn edge_between(&self, u: u32, v: u32) -> Option<u32> {
        self.adjacency[u as usize]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
    }

    /// An edge whose endpoints both have degree 1 (a K2 component), if any.
    /// Distinguishing colourings are undefined on graphs containing one.
    pub fn isolated_edge(&self) -> Option<u32> {
        self.edges
            .iter()
            .enumerate()
            .find(|&(_, &(u, v))| self.degree(u) == 1 && self.degree(v) == 1)
            .map(|(id, _)| id as u32)
    }

    /// BFS distance between two vertices; `None` when disconnected.
    pub fn distance(&self, u: u32, v: u32) -> Option<u32> {
        if u == v {
            return Some(0);
        }
        let mut dist = vec![u32::MAX; self.n as usize];
        dist[u as usize] = 0;
        let mut queue = std::collections::VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x as usize] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    if y == v {
                        return Some(dist[y as usize]);
                    }
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// All vertices `u ≠ v` with `distance(v, u) ≤ r`, via BFS truncated at
    /// depth `r`; ascending vertex order.
    pub fn r_neighbours(&self, v: u32, r: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n as usize];
        dist[v as usize] = 0;
        let mut queue = std::collections::VecDeque::from([v]);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            if dist[x as usize] == r {
                continue;
            }
            for &(y, _) in &self.adjacency[x as usize] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All unordered pairs `u < v` at distance 1..=r, with the distance.
    pub fn r_adjacent_pairs(&self, r: u32) -> Vec<(u32, u32, u32)> {
        let mut pairs = Vec::new();
        for v in 0..self.n {
            // One truncated BFS per vertex; emit only the u < v half.
            let mut dist = vec![u32::MAX; self.n as usize];
            dist[v as usize] = 0;
            let mut queue = std::collections::VecDeque::from([v]);
            while let Some(x) = queue.pop_front() {
                if dist[x as usize] == r {
                    continue;
                }
                for &(y, _) in &self.adjacency[x as usize] {
                    if dist[y as usize] == u32::MAX {
                        dist[y as usize] = dist[x as usize] + 1;
                        if y > v {
                            pairs.push((v, y, dist[y as usize]));
                        }
                        queue.push_back(y);
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// The subset of [`Graph::r_adjacent_pairs`] with equal endpoint degrees —
    /// the only pairs a proper total colouring can fail to distinguish.
    pub fn same_degree_r_adjacent_pairs(&self, r: u32) -> Vec<(u32, u32, u32)> {
        self.r_adjacent_pairs(r)
            .into_iter()
            .filter(|&(u, v, _)| self.degree(u) == self.degree(v))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.r_neighbours(0, self.n).len() as u32 == self.n - 1
    }

    /// Largest finite BFS eccentricity; `None` for disconnected graphs.
    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0;
        for v in 0..self.n {
            let mut dist = vec![u32::MAX; self.n as usize];
            dist[v as usize] = 0;
            let mut queue = std::collections::VecDeque::from([v]);
            let mut reached = 1;
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &self.adjacency[x as usize] {
                    if dist[y as usize] == u32::MAX {
                        dist[y as usize] = dist[x as usize] + 1;
                        best = best.max(dist[y as usize]);
                        reached += 1;
                        queue.push_back(y);
                    }
                }
            }
            if reached < self.n {
                return None;
            }
        }
        Some(best)
    }
}

// ---------------------------------------------------------------------------
// Classic families
// ---------------------------------------------------------------------------

/// Family selector for [`gen_classic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicKind {
    Path,
    Cycle,
    Complete,
    Star,
    /// d-regular via the pairing model; carries the degree.
    RandomRegular(u32),
}

/// Generate one of the classic families on `n` vertices. The seed only
/// matters for `RandomRegular`.
pub fn gen_classic(kind: ClassicKind, n: u32, seed: u64) -> Result<Graph, GraphError> {
    match kind {
        ClassicKind::Path => gen_path(n),
        ClassicKind::Cycle => gen_cycle(n),
        ClassicKind::Complete => gen_complete(n),
        ClassicKind::Star => gen_star(n),
        ClassicKind::RandomRegular(d) => gen_random_regular(n, d, seed),
    }
}

pub fn gen_path(n: u32) -> Result<Graph, GraphError> {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges_with_n(n.max(1), &edges)
}

pub fn gen_cycle(n: u32) -> Result<Graph, GraphError> {
    if n < 3 {
        // C_1/C_2 would need a loop or a parallel edge.
        return Err(if n < 2 {
            GraphError::EmptyGraph
        } else {
            GraphError::DuplicateEdge(0, 1)
        });
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges_with_n(n, &edges)
}

pub fn gen_complete(n: u32) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges_with_n(n.max(1), &edges)
}

/// Star K_{1,n-1}: centre 0, leaves 1..n.
pub fn gen_star(n: u32) -> Result<Graph, GraphError> {
    let edges: Vec<_> = (1..n).map(|leaf| (0, leaf)).collect();
    Graph::from_edges_with_n(n.max(1), &edges)
}

/// Random d-regular graph via the pairing model: n·d points, d per cell, are
/// matched into pairs; pairs forming a loop or a parallel edge are rejected
/// as they are drawn, and the whole pairing restarts when it dead-ends with
/// only unusable points left. Near-uniform at the scales this crate targets.
pub fn gen_random_regular(n: u32, d: u32, seed: u64) -> Result<Graph, GraphError> {
    if d >= n || (n as u64 * d as u64) % 2 == 1 {
        return Err(GraphError::InfeasibleRegular { n, d });
    }
    if d == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut rng = crate::seed::rng_for(seed, "pairing-model", 0);
    let points = (n * d) as usize;
    'restart: loop {
        let mut unmatched: Vec<u32> = (0..points as u32).collect();
        unmatched.shuffle(&mut rng);
        let mut adjacent = std::collections::HashSet::new();
        let mut edges = Vec::with_capacity(points / 2);
        while !unmatched.is_empty() {
            let mut attempts = 0;
            loop {
                let i = rng.gen_range(0..unmatched.len());
                let mut j = rng.gen_range(0..unmatched.len() - 1);
                if j >= i {
                    j += 1;
                }
                let (u, v) = (unmatched[i] / d, unmatched[j] / d);
                let key = (u.min(v), u.max(v));
                if u != v && !adjacent.contains(&key) {
                    adjacent.insert(key);
                    edges.push(key);
                    let (hi, lo) = (i.max(j), i.min(j));
                    unmatched.swap_remove(hi);
                    unmatched.swap_remove(lo);
                    break;
                }
                attempts += 1;
                if attempts > 32 * unmatched.len() {
                    // Probably stuck; confirm by exhaustive check before
                    // declaring a dead end and restarting the pairing.
                    if !any_usable_pair(&unmatched, d, &adjacent) {
                        continue 'restart;
                    }
                    attempts = 0;
                }
            }
        }
        return Graph::from_edges_with_n(n, &edges);
    }
}

fn any_usable_pair(
    unmatched: &[u32],
    d: u32,
    adjacent: &std::collections::HashSet<(u32, u32)>,
) -> bool {
    for (idx, &p) in unmatched.iter().enumerate() {
        for &q in &unmatched[idx + 1..] {
            let (u, v) = (p / d, q / d);
            if u != v && !adjacent.contains(&(u.min(v), u.max(v))) {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Word-overlap (de Bruijn) graphs
// ---------------------------------------------------------------------------

/// Parameters of the word-overlap graph: all t^k words of length `k` over a
/// `t`-letter alphabet, adjacency by one-letter shift overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeBruijnSpec {
    pub t: u32,
    pub k: u32,
}

impl DeBruijnSpec {
    pub fn new(t: u32, k: u32) -> DeBruijnSpec {
        DeBruijnSpec { t, k }
    }

    /// t^k as a checked machine integer.
    fn order(&self, cap: usize) -> Result<u64, GraphError> {
        let order = (self.t as u64)
            .checked_pow(self.k)
            .ok_or_else(|| GraphError::SizeCap(format!("{}^{} overflows", self.t, self.k)))?;
        // Every vertex has ≤ 2t neighbours, so t^k·t bounds the edge count.
        let edge_bound = order.checked_mul(self.t as u64);
        match edge_bound {
            Some(b) if b <= cap as u64 => Ok(order),
            _ => Err(GraphError::SizeCap(format!(
                "word-overlap graph t={} k={} has up to {}·t edges, cap {}",
                self.t, self.k, order, cap
            ))),
        }
    }
}

/// Generate the word-overlap graph for `spec` under the default size cap.
///
/// Words `a`, `b` are adjacent when `a` with its first letter dropped is a
/// prefix of `b`, or vice versa; for k=1 that condition is empty, so all
/// distinct pairs are adjacent. Words are encoded as base-t integers, most
/// significant letter first, and the integer is the vertex id.
pub fn gen_de_bruijn(spec: DeBruijnSpec) -> Result<Graph, GraphError> {
    gen_de_bruijn_capped(spec, DEFAULT_EDGE_CAP)
}

pub fn gen_de_bruijn_capped(spec: DeBruijnSpec, cap: usize) -> Result<Graph, GraphError> {
    let (t, k) = (spec.t as u64, spec.k);
    assert!(
        t >= 1 && k >= 1,
        "alphabet and word length must be positive"
    );
    let order = spec.order(cap)?;
    let mut edges = Vec::new();
    // Neighbours of word w: every (x, w_1..w_{k-1}) and every (w_2..w_k, y).
    // Generated arithmetically: drop the least significant letter and prepend,
    // or drop the most significant letter and append.
    let high = order / t; // t^(k-1)
    for w in 0..order {
        let mut nbrs: Vec<u64> = Vec::with_capacity(2 * t as usize);
        for x in 0..t {
            nbrs.push(x * high + w / t); // shift right, prepend x
            nbrs.push((w % high) * t + x); // shift left, append x
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        for &u in nbrs.iter().filter(|&&u| u > w) {
            edges.push((w as u32, u as u32));
        }
    }
    Graph::from_edges_with_n(order as u32, &edges)
}

// ---------------------------------------------------------------------------
// Clique-decorated lower-bound family
// ---------------------------------------------------------------------------

/// The family witnessing that r-distant distinguishing may need many more
/// than Δ+2 colours: a word-overlap backbone in which every backbone vertex
/// is identified with one vertex from each of 2N fresh copies of K_r. The
/// non-identified clique vertices all have degree r−1 and sit pairwise within
/// distance r of each other, which is what the counting certificate exploits.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub r: u32,
    pub n_scale: u32,
    /// The word-overlap backbone on its own.
    pub core: Graph,
    /// Backbone plus attached cliques.
    pub full: Graph,
    /// All vertices of degree r−1 (the fresh clique vertices).
    pub special_vertices: Vec<u32>,
    /// Backbone vertex → lowest fresh vertex id of each of its 2N cliques.
    pub attachment: BTreeMap<u32, Vec<u32>>,
}

/// Number of special vertices the construction must produce:
/// 2·[N(r−1)]^(r−1)·(r−2)^(r−2).
pub fn expected_special_count(r: u32, n_scale: u32) -> BigUint {
    let n = BigUint::from(n_scale);
    let rm1 = BigUint::from(r - 1);
    let rm2 = BigUint::from(r - 2);
    BigUint::from(2u32) * (n * rm1).pow(r - 1) * rm2.pow(r - 2)
}

/// Build the clique-decorated instance for distance parameter `r ≥ 3` and
/// scale `N ≥ 1`, under the default size cap. The three structural
/// invariants (special count, Δ bound, pairwise special distance ≤ r) are
/// re-checked on the built graph and failures are a panic, not an error:
/// they would mean the construction itself is wrong.
pub fn gen_lower_bound_instance(r: u32, n_scale: u32) -> Result<LowerBoundInstance, GraphError> {
    gen_lower_bound_instance_capped(r, n_scale, DEFAULT_EDGE_CAP)
}

pub fn gen_lower_bound_instance_capped(
    r: u32,
    n_scale: u32,
    cap: usize,
) -> Result<LowerBoundInstance, GraphError> {
    assert!(
        r >= 3,
        "distance parameter below 3 has no clique decoration"
    );
    assert!(n_scale >= 1, "scale parameter must be positive");
    let t = n_scale * (r - 2) * (r - 1);
    let k = r - 2;

    // Exact size accounting before touching memory; the family explodes fast.
    let order = BigUint::from(t).pow(k);
    let cliques = BigUint::from(2 * n_scale) * &order;
    let clique_edges = &cliques * BigUint::from(r * (r - 1) / 2);
    let backbone_edge_bound = &order * BigUint::from(t);
    let total_bound = &clique_edges + &backbone_edge_bound;
    if total_bound > BigUint::from(cap) {
        return Err(GraphError::SizeCap(format!(
            "instance r={r} N={n_scale} needs up to {total_bound} edges, cap {cap}; \
             use the counting certificate instead"
        )));
    }

    let core = gen_de_bruijn_capped(DeBruijnSpec::new(t, k), cap)?;
    let backbone_n = core.n();
    let mut edges: Vec<(u32, u32)> = core.edges().to_vec();
    let mut next = backbone_n;
    let mut attachment = BTreeMap::new();
    let mut special_vertices = Vec::new();
    for b in 0..backbone_n {
        let mut roots = Vec::with_capacity(2 * n_scale as usize);
        for _ in 0..2 * n_scale {
            // One K_r: the backbone vertex is identified with the clique's
            // lowest-id member; the other r−1 members are fresh.
            let fresh: Vec<u32> = (next..next + (r - 1)).collect();
            next += r - 1;
            roots.push(fresh[0]);
            for (i, &x) in fresh.iter().enumerate() {
                edges.push((b, x));
                for &y in &fresh[i + 1..] {
                    edges.push((x, y));
                }
            }
            special_vertices.extend_from_slice(&fresh);
        }
        attachment.insert(b, roots);
    }
    let full = Graph::from_edges_with_n(next, &edges)?;

    let instance = LowerBoundInstance {
        r,
        n_scale,
        core,
        full,
        special_vertices,
        attachment,
    };
    instance.check_invariants();
    Ok(instance)
}

impl LowerBoundInstance {
    /// Re-check the structural invariants the counting argument relies on.
    fn check_invariants(&self) {
        let expected = expected_special_count(self.r, self.n_scale);
        assert_eq!(
            BigUint::from(self.special_vertices.len()),
            expected,
            "special vertex count mismatch"
        );
        for &s in &self.special_vertices {
            assert_eq!(self.full.degree(s), self.r - 1, "special vertex degree");
        }
        let delta_bound = 2 * self.n_scale * (self.r - 1) * (self.r - 1);
        assert!(
            self.full.max_degree() <= delta_bound,
            "maximum degree {} exceeds bound {}",
            self.full.max_degree(),
            delta_bound
        );
        // Pairwise distance ≤ r among special vertices, via one truncated
        // BFS per special vertex.
        let special: std::collections::HashSet<u32> =
            self.special_vertices.iter().copied().collect();
        for &s in &self.special_vertices {
            let reached = self.full.r_neighbours(s, self.r);
            let mut missing = special.len() - 1;
            for v in reached {
                if special.contains(&v) {
                    missing -= 1;
                }
            }
            assert_eq!(missing, 0, "special vertex {s} too far from some other");
        }
    }
}
