//! Edge colourings, palettes and the distinguishing verifier.
//!
//! A colouring assigns positive integers to edges; a *partial* colouring may
//! leave edges uncoloured, and every palette-style query then counts coloured
//! edges only. The verifier reports every pair of vertices at distance
//! `1..=r` whose palettes coincide.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColouringError {
    #[error("graph has an isolated edge {u}-{v}; distinguishing colourings are undefined on it")]
    IsolatedEdge { u: u32, v: u32 },
    #[error("colouring covers {got} edges but the graph has {expected}")]
    WrongEdgeCount { got: usize, expected: usize },
}

/// Read-only access shared by total and partial colourings.
pub trait ColourMap {
    /// Colour of edge `e`, or `None` when uncoloured.
    fn colour(&self, e: u32) -> Option<u32>;
    fn edge_count(&self) -> usize;
}

/// Total colouring: every edge has a colour ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColouring {
    colours: Vec<u32>,
}

impl EdgeColouring {
    pub fn new(colours: Vec<u32>) -> EdgeColouring {
        assert!(
            colours.iter().all(|&c| c >= 1),
            "colours are positive integers"
        );
        EdgeColouring { colours }
    }

    pub fn get(&self, e: u32) -> u32 {
        self.colours[e as usize]
    }

    pub fn set(&mut self, e: u32, colour: u32) {
        assert!(colour >= 1);
        self.colours[e as usize] = colour;
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    /// Number of distinct colours in use.
    pub fn colour_count(&self) -> usize {
        self.colours.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn max_colour(&self) -> u32 {
        self.colours.iter().copied().max().unwrap_or(0)
    }
}

impl ColourMap for EdgeColouring {
    fn colour(&self, e: u32) -> Option<u32> {
        Some(self.colours[e as usize])
    }

    fn edge_count(&self) -> usize {
        self.colours.len()
    }
}

/// Partial colouring over a fixed edge set; `None` marks uncoloured edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialColouring {
    slots: Vec<Option<u32>>,
}

impl PartialColouring {
    /// All edges uncoloured.
    pub fn empty(edge_count: usize) -> PartialColouring {
        PartialColouring {
            slots: vec![None; edge_count],
        }
    }

    pub fn from_slots(slots: Vec<Option<u32>>) -> PartialColouring {
        assert!(slots.iter().flatten().all(|&c| c >= 1));
        PartialColouring { slots }
    }

    pub fn set(&mut self, e: u32, colour: u32) {
        assert!(colour >= 1);
        self.slots[e as usize] = Some(colour);
    }

    pub fn clear(&mut self, e: u32) {
        self.slots[e as usize] = None;
    }

    pub fn is_coloured(&self, e: u32) -> bool {
        self.slots[e as usize].is_some()
    }

    /// Ascending ids of uncoloured edges (the set U of a partial colouring).
    pub fn uncoloured(&self) -> Vec<u32> {
        (0..self.slots.len() as u32)
            .filter(|&e| self.slots[e as usize].is_none())
            .collect()
    }

    pub fn uncoloured_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_none()).count()
    }

    /// Uncoloured edges incident to `v`, ascending.
    pub fn uncoloured_at(&self, graph: &Graph, v: u32) -> Vec<u32> {
        let mut out: Vec<u32> = graph
            .adjacency(v)
            .iter()
            .filter(|&&(_, e)| self.slots[e as usize].is_none())
            .map(|&(_, e)| e)
            .collect();
        out.sort_unstable();
        out
    }

    /// Total colouring, if complete.
    pub fn into_total(self) -> Option<EdgeColouring> {
        let colours: Option<Vec<u32>> = self.slots.into_iter().collect();
        colours.map(EdgeColouring::new)
    }
}

impl ColourMap for PartialColouring {
    fn colour(&self, e: u32) -> Option<u32> {
        self.slots[e as usize]
    }

    fn edge_count(&self) -> usize {
        self.slots.len()
    }
}

impl From<&EdgeColouring> for PartialColouring {
    fn from(total: &EdgeColouring) -> PartialColouring {
        PartialColouring {
            slots: total.colours().iter().map(|&c| Some(c)).collect(),
        }
    }
}

/// Set of colours on the coloured edges incident to `v`.
pub fn palette<C: ColourMap + ?Sized>(graph: &Graph, colouring: &C, v: u32) -> BTreeSet<u32> {
    graph
        .adjacency(v)
        .iter()
        .filter_map(|&(_, e)| colouring.colour(e))
        .collect()
}

/// Sum of colours on the coloured edges incident to `v` (0 for an isolated
/// vertex or an entirely uncoloured neighbourhood).
pub fn colour_sum<C: ColourMap + ?Sized>(graph: &Graph, colouring: &C, v: u32) -> u64 {
    graph
        .adjacency(v)
        .iter()
        .filter_map(|&(_, e)| colouring.colour(e))
        .map(u64::from)
        .sum()
}

/// `|S(u) △ S(v)|` under the (partial) colouring.
pub fn symmetric_difference_size<C: ColourMap + ?Sized>(
    graph: &Graph,
    colouring: &C,
    u: u32,
    v: u32,
) -> usize {
    assert_ne!(u, v);
    let a = palette(graph, colouring, u);
    let b = palette(graph, colouring, v);
    a.symmetric_difference(&b).count()
}

/// Properness check; on failure returns the first clashing edge pair in
/// (vertex, edge, edge) order. Only coloured edges participate.
pub fn is_proper<C: ColourMap + ?Sized>(graph: &Graph, colouring: &C) -> Result<(), (u32, u32)> {
    for v in 0..graph.n() {
        let mut seen: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        let mut incident: Vec<(u32, u32)> = graph
            .adjacency(v)
            .iter()
            .filter_map(|&(_, e)| colouring.colour(e).map(|c| (e, c)))
            .collect();
        incident.sort_unstable();
        for (e, c) in incident {
            if let Some(&other) = seen.get(&c) {
                return Err((other, e));
            }
            seen.insert(c, e);
        }
    }
    Ok(())
}

/// One undistinguished pair: equal palettes at distance `dist ≤ r`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Conflict {
    pub u: u32,
    pub v: u32,
    pub dist: u32,
    /// The shared palette, ascending.
    pub palette: Vec<u32>,
}

/// Verifier output. Serialises to the fixed report schema
/// `{proper, rUsed, conflictCount, conflicts, coloursUsed}`; bookkeeping
/// fields beyond the schema stay out of the JSON.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConflictReport {
    pub proper: bool,
    pub r_used: u32,
    /// Total number of conflicting pairs, even when the list is capped.
    pub conflict_count: usize,
    pub conflicts: Vec<Conflict>,
    pub colours_used: usize,
    #[serde(skip)]
    pub checked_pairs: usize,
    #[serde(skip)]
    pub truncated: bool,
}

/// Default cap on the number of conflicts listed (all are still counted).
pub const DEFAULT_CONFLICT_CAP: usize = 10_000;

/// Check the r-distant distinguishing property: every pair of vertices at
/// distance `1..=r` must have different palettes.
///
/// For proper *total* colourings, palettes have size equal to the degree, so
/// only same-degree pairs are compared; partial or improper colourings fall
/// back to comparing every r-adjacent pair. Two empty palettes count as
/// equal, exactly as the definition reads.
pub fn verify_distinguishing<C: ColourMap + ?Sized>(
    graph: &Graph,
    colouring: &C,
    r: u32,
) -> Result<ConflictReport, ColouringError> {
    verify_distinguishing_capped(graph, colouring, r, DEFAULT_CONFLICT_CAP)
}

pub fn verify_distinguishing_capped<C: ColourMap + ?Sized>(
    graph: &Graph,
    colouring: &C,
    r: u32,
    cap: usize,
) -> Result<ConflictReport, ColouringError> {
    assert!(r >= 1, "distance parameter must be at least 1");
    if colouring.edge_count() != graph.m() {
        return Err(ColouringError::WrongEdgeCount {
            got: colouring.edge_count(),
            expected: graph.m(),
        });
    }
    if let Some(e) = graph.isolated_edge() {
        let (u, v) = graph.endpoints(e);
        return Err(ColouringError::IsolatedEdge { u, v });
    }

    let proper = is_proper(graph, colouring).is_ok();
    let total = (0..graph.m() as u32).all(|e| colouring.colour(e).is_some());
    let shortcut = proper && total;

    let mut palettes: Vec<Option<BTreeSet<u32>>> = vec![None; graph.n() as usize];
    let mut palette_of = |v: u32| -> BTreeSet<u32> {
        palettes[v as usize]
            .get_or_insert_with(|| palette(graph, colouring, v))
            .clone()
    };

    let mut conflicts = Vec::new();
    let mut conflict_count = 0;
    let mut checked_pairs = 0;
    for (u, v, dist) in graph.r_adjacent_pairs(r) {
        checked_pairs += 1;
        if shortcut && graph.degree(u) != graph.degree(v) {
            continue;
        }
        let pu = palette_of(u);
        if pu == palette_of(v) {
            conflict_count += 1;
            if conflicts.len() < cap {
                conflicts.push(Conflict {
                    u,
                    v,
                    dist,
                    palette: pu.into_iter().collect(),
                });
            }
        }
    }

    let colours_used = {
        let mut set = BTreeSet::new();
        for e in 0..graph.m() as u32 {
            if let Some(c) = colouring.colour(e) {
                set.insert(c);
            }
        }
        set.len()
    };

    Ok(ConflictReport {
        proper,
        r_used: r,
        conflict_count,
        truncated: conflict_count > conflicts.len(),
        conflicts,
        colours_used,
        checked_pairs,
    })
}
