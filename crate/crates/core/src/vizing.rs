//! Proper edge colouring with Δ+1 colours from a prescribed block.
//!
//! The colourer follows the classical fan construction: to place an edge uv
//! it grows a maximal fan around u, flips a two-colour alternating path when
//! the fan is stuck, rotates a fan prefix and drops the freed colour on the
//! last fan edge. Everything is deterministic — ties break towards lower
//! vertex ids and earlier block positions — so a given graph always receives
//! the same colouring.
//!
//! Three entry points share the machinery: colour a whole graph, colour only
//! a designated edge subset (leaving the rest untouched), or complete a
//! partial colouring using a block of fresh colours disjoint from everything
//! already placed.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::colouring::{ColourMap, EdgeColouring, PartialColouring};
use crate::graph::Graph;

/// An ordered list of distinct positive colours supplied by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourBlock {
    colours: Vec<u32>,
}

impl ColourBlock {
    pub fn new(colours: Vec<u32>) -> ColourBlock {
        assert!(colours.iter().all(|&c| c >= 1), "colours are positive");
        let distinct: BTreeSet<u32> = colours.iter().copied().collect();
        assert_eq!(distinct.len(), colours.len(), "block colours are distinct");
        ColourBlock { colours }
    }

    /// The block `start, start+1, .., start+len-1`.
    pub fn contiguous(start: u32, len: usize) -> ColourBlock {
        assert!(start >= 1);
        ColourBlock {
            colours: (0..len as u32).map(|i| start + i).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    pub fn contains(&self, colour: u32) -> bool {
        self.colours.contains(&colour)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VizingError {
    #[error("block of {got} colours cannot guarantee a proper colouring; {needed} needed")]
    BlockTooSmall { needed: usize, got: usize },
    #[error("fresh block reuses colour {colour} already present in the partial colouring")]
    BlockNotDisjoint { colour: u32 },
}

/// Proper colouring of all of `graph` inside `block`; needs `Δ+1` colours.
pub fn vizing_colour(graph: &Graph, block: &ColourBlock) -> Result<EdgeColouring, VizingError> {
    let needed = graph.max_degree() as usize + 1;
    if block.len() < needed {
        return Err(VizingError::BlockTooSmall {
            needed,
            got: block.len(),
        });
    }
    let all: Vec<u32> = (0..graph.m() as u32).collect();
    let partial = run_fans(graph, &all, block);
    Ok(partial.into_total().expect("all edges coloured"))
}

/// Proper colouring of the subgraph spanned by `edge_subset`, inside `block`;
/// needs `Δ_sub+1` colours. Edges outside the subset stay uncoloured.
pub fn vizing_on_subgraph(
    graph: &Graph,
    edge_subset: &[u32],
    block: &ColourBlock,
) -> Result<PartialColouring, VizingError> {
    let distinct: BTreeSet<u32> = edge_subset.iter().copied().collect();
    assert_eq!(
        distinct.len(),
        edge_subset.len(),
        "edge subset has no repeats"
    );
    assert!(
        edge_subset.iter().all(|&e| (e as usize) < graph.m()),
        "edge ids in range"
    );
    let needed = subgraph_max_degree(graph, edge_subset) as usize + 1;
    if block.len() < needed {
        return Err(VizingError::BlockTooSmall {
            needed,
            got: block.len(),
        });
    }
    Ok(run_fans(graph, edge_subset, block))
}

/// Completes `partial` into a total proper colouring by running the fan
/// colourer on the uncoloured subgraph with `fresh_block`, which must be
/// disjoint from every colour already placed and hold at least
/// `Δ(uncoloured subgraph)+1` colours. Previously coloured edges are never
/// altered; a fully coloured input is returned unchanged without touching
/// the block at all.
pub fn extend_partial(
    graph: &Graph,
    partial: &PartialColouring,
    fresh_block: &ColourBlock,
) -> Result<EdgeColouring, VizingError> {
    assert_eq!(partial.edge_count(), graph.m());
    let uncoloured = partial.uncoloured();
    if uncoloured.is_empty() {
        return Ok(partial.clone().into_total().expect("no uncoloured edges"));
    }
    for e in 0..graph.m() as u32 {
        if let Some(c) = partial.colour(e) {
            if fresh_block.contains(c) {
                return Err(VizingError::BlockNotDisjoint { colour: c });
            }
        }
    }
    let fresh = vizing_on_subgraph(graph, &uncoloured, fresh_block)?;
    let mut out = partial.clone();
    for &e in &uncoloured {
        out.set(e, fresh.colour(e).expect("subset edge coloured"));
    }
    Ok(out.into_total().expect("all edges coloured"))
}

fn subgraph_max_degree(graph: &Graph, edge_subset: &[u32]) -> u32 {
    let mut deg = vec![0u32; graph.n() as usize];
    for &e in edge_subset {
        let (u, v) = graph.endpoints(e);
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// Peel-and-reverse ordering of the subset edges: repeatedly delete the edge
/// with fewest remaining incident subset edges (lowest id on ties), then
/// insert in reverse deletion order, so every edge arrives with as few
/// coloured neighbours as the peel allows.
pub(crate) fn insertion_order(graph: &Graph, edge_subset: &[u32]) -> Vec<u32> {
    let mut deg = vec![0u32; graph.n() as usize];
    for &e in edge_subset {
        let (u, v) = graph.endpoints(e);
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    let mut alive = vec![false; graph.m()];
    for &e in edge_subset {
        alive[e as usize] = true;
    }
    let mut key = vec![0usize; graph.m()];
    let mut max_key = 0;
    for &e in edge_subset {
        let (u, v) = graph.endpoints(e);
        key[e as usize] = (deg[u as usize] + deg[v as usize] - 2) as usize;
        max_key = max_key.max(key[e as usize]);
    }
    let mut buckets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); max_key + 1];
    for &e in edge_subset {
        buckets[key[e as usize]].insert(e);
    }
    let mut removal = Vec::with_capacity(edge_subset.len());
    let mut cur = 0usize;
    while removal.len() < edge_subset.len() {
        while buckets[cur].is_empty() {
            cur += 1;
        }
        let e = *buckets[cur].iter().next().expect("non-empty bucket");
        buckets[cur].remove(&e);
        alive[e as usize] = false;
        removal.push(e);
        let (u, v) = graph.endpoints(e);
        for x in [u, v] {
            deg[x as usize] -= 1;
            for &(_, g) in graph.adjacency(x) {
                if alive[g as usize] {
                    let k = key[g as usize];
                    buckets[k].remove(&g);
                    key[g as usize] = k - 1;
                    buckets[k - 1].insert(g);
                    cur = cur.min(k - 1);
                }
            }
        }
    }
    removal.reverse();
    removal
}

/// Fan-colourer working over block indices `0..b`; the caller guarantees
/// `b ≥ Δ_sub+1`.
struct FanState<'g> {
    graph: &'g Graph,
    b: usize,
    /// `at[v][c]` = edge currently carrying block colour `c` at `v`.
    at: Vec<Vec<Option<u32>>>,
    /// Block colour of each edge (subset edges only).
    col: Vec<Option<usize>>,
    /// Per-vertex scope adjacency, ascending neighbour id.
    scope_adj: Vec<Vec<(u32, u32)>>,
    in_fan: Vec<bool>,
}

impl<'g> FanState<'g> {
    fn first_free(&self, v: u32) -> usize {
        (0..self.b)
            .find(|&c| self.at[v as usize][c].is_none())
            .expect("block exceeds scope degree, a free colour exists")
    }

    fn is_free(&self, v: u32, c: usize) -> bool {
        self.at[v as usize][c].is_none()
    }

    fn assign(&mut self, e: u32, c: usize) {
        let (u, v) = self.graph.endpoints(e);
        debug_assert!(self.at[u as usize][c].is_none());
        debug_assert!(self.at[v as usize][c].is_none());
        self.col[e as usize] = Some(c);
        self.at[u as usize][c] = Some(e);
        self.at[v as usize][c] = Some(e);
    }

    fn unassign(&mut self, e: u32) -> usize {
        let c = self.col[e as usize].take().expect("edge is coloured");
        let (u, v) = self.graph.endpoints(e);
        self.at[u as usize][c] = None;
        self.at[v as usize][c] = None;
        c
    }

    /// Maximal fan of `u` seeded with the uncoloured edge to `v`; entries are
    /// `(fan vertex, edge to u)`. Extensions pick the lowest-id neighbour
    /// whose edge colour is free at the current last fan vertex.
    fn build_fan(&mut self, u: u32, v: u32, e: u32) -> Vec<(u32, u32)> {
        let mut fan = vec![(v, e)];
        self.in_fan[v as usize] = true;
        loop {
            let (last, _) = *fan.last().expect("fan is non-empty");
            let mut next = None;
            for &(w, g) in &self.scope_adj[u as usize] {
                if self.in_fan[w as usize] {
                    continue;
                }
                if let Some(cw) = self.col[g as usize] {
                    if self.is_free(last, cw) {
                        next = Some((w, g));
                        break;
                    }
                }
            }
            match next {
                Some((w, g)) => {
                    self.in_fan[w as usize] = true;
                    fan.push((w, g));
                }
                None => break,
            }
        }
        for &(w, _) in &fan {
            self.in_fan[w as usize] = false;
        }
        fan
    }

    /// Flips the maximal alternating path of colours `d,c,d,..` starting at
    /// `x` (which has no `c`-edge), swapping `c` and `d` along it.
    fn invert_path(&mut self, x: u32, c: usize, d: usize) {
        let mut edges = Vec::new();
        let mut here = x;
        let mut want = d;
        while let Some(g) = self.at[here as usize][want] {
            edges.push(g);
            let (a, b) = self.graph.endpoints(g);
            here = if a == here { b } else { a };
            want = if want == d { c } else { d };
        }
        let old: Vec<usize> = edges.iter().map(|&g| self.unassign(g)).collect();
        for (&g, &was) in edges.iter().zip(&old) {
            self.assign(g, if was == c { d } else { c });
        }
    }

    /// Places the uncoloured edge `e = uv`; every other scope edge keeps a
    /// proper colour throughout.
    fn place(&mut self, e: u32) {
        let (u, v) = self.graph.endpoints(e);
        // Fast path: a colour free at both ends.
        if let Some(c) = (0..self.b).find(|&c| self.is_free(u, c) && self.is_free(v, c)) {
            self.assign(e, c);
            return;
        }
        let fan = self.build_fan(u, v, e);
        let c = self.first_free(u);
        let d = self.first_free(fan.last().expect("fan non-empty").0);
        if c != d {
            self.invert_path(u, c, d);
        }
        // First fan vertex with d free whose prefix is still a fan.
        let mut target = None;
        for (j, &(w, g)) in fan.iter().enumerate() {
            if j > 0 {
                let prev = fan[j - 1].0;
                let cj = self.col[g as usize].expect("later fan edges are coloured");
                if !self.is_free(prev, cj) {
                    break;
                }
            }
            if self.is_free(w, d) {
                target = Some(j);
                break;
            }
        }
        let j = target.expect("a rotation target exists after the path flip");
        let shifted: Vec<usize> = (1..=j).map(|i| self.unassign(fan[i].1)).collect();
        for i in 0..j {
            self.assign(fan[i].1, shifted[i]);
        }
        self.assign(fan[j].1, d);
    }
}

fn run_fans(graph: &Graph, edge_subset: &[u32], block: &ColourBlock) -> PartialColouring {
    let mut scope_adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); graph.n() as usize];
    for &e in edge_subset {
        let (u, v) = graph.endpoints(e);
        scope_adj[u as usize].push((v, e));
        scope_adj[v as usize].push((u, e));
    }
    for adj in &mut scope_adj {
        adj.sort_unstable();
    }
    let order = insertion_order(graph, edge_subset);

    // Work over the first Δ_sub+1 block positions only, however wide the
    // block is: the fan argument needs no more, and this keeps the number
    // of distinct colours at its guarantee instead of block width.
    let b = (subgraph_max_degree(graph, edge_subset) as usize + 1).min(block.len());
    let mut state = FanState {
        graph,
        b,
        at: vec![vec![None; b]; graph.n() as usize],
        col: vec![None; graph.m()],
        scope_adj,
        in_fan: vec![false; graph.n() as usize],
    };
    for e in order {
        state.place(e);
    }

    let mut out = PartialColouring::empty(graph.m());
    for &e in edge_subset {
        let idx = state.col[e as usize].expect("every subset edge placed");
        out.set(e, block.colours()[idx]);
    }
    out
}
