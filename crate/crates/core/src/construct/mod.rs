//! Randomised colouring pipelines with resampling and deterministic repair.
//!
//! Two constructions share this module's plumbing. The dense pipeline
//! uncolours a proper base colouring by coin flips, recovers overloaded
//! vertices, uncolours a little more around palette-poor vertices and hands
//! the remainder to a fresh-block extension. The asymptotic pipeline splits
//! colours into classes, assigns every edge a class index, colours each
//! class on its own block, then uncolours and recolours inside per-class
//! reserve blocks.
//!
//! Both detect named bad events, resample the random choices inside an
//! event's dependency scope until the state is event-free or the budget is
//! spent, and finish with a repair loop that guarantees a proper,
//! conflict-free output regardless of how the random phases went. At small
//! maximum degree the probabilistic guarantees do not apply — probabilities
//! clamp, selections become forced — and the pipelines detect those futile
//! situations, flag them, and lean on the repair guarantee instead.

pub mod asymptotic;
pub mod census;
pub mod dense;
pub mod repair;

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

pub use asymptotic::{construct_asymptotic, AsymptoticPlan};
pub use census::{event_census, CensusReport, CensusRow};
pub use dense::{
    construct_dense, stage_one, stage_two, DensePipelineParams, StageOneState, StageTwoOutcome,
};
pub use repair::RepairEntry;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("graph has an isolated edge {u}-{v}")]
    IsolatedEdge { u: u32, v: u32 },
    #[error(
        "minimum degree {min_degree} below the required fraction {required} of the maximum degree"
    )]
    DegreeRatioViolated { min_degree: u32, required: String },
    #[error("minimum degree {min_degree} below the required {required}")]
    MinDegreeTooSmall { min_degree: u32, required: u32 },
    #[error("maximum degree {max_degree} below the plan floor {floor}")]
    DeltaBelowFloor { max_degree: u32, floor: u32 },
}

/// Names for every detectable bad event across both pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum BadEventKind {
    /// Too many palette-poor neighbours around one vertex.
    DenseNeighbourhoodLoad,
    /// A same-degree pair within distance r, one endpoint palette-rich,
    /// with too small a palette symmetric difference.
    DensePaletteSlack,
    /// A palette-rich vertex lost too many edges to the second uncolouring.
    StageTwoOverload,
    /// Two palette-poor vertices left with identical partial palettes.
    StageTwoPaletteClash,
    /// Equal class-index sets on a low-degree same-degree pair.
    IndexPaletteClash,
    /// One vertex with too many incident edges in a single class.
    IndexClassOverload,
    /// Uncoloured degree drifted too far from its expectation.
    UncolourConcentration,
    /// Too many uncoloured edges of one class at one vertex.
    UncolourClassOverload,
    /// Equal partial palettes on a high-degree same-degree pair.
    FinalPaletteClash,
}

/// A violated event: which check, where, and the measurement that tripped it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BadEvent {
    pub kind: BadEventKind,
    /// Vertices the event is about, ascending.
    pub vertices: Vec<u32>,
    pub class_index: Option<u32>,
    pub witness: String,
}

/// Cap on stored flagged events; totals are still counted per kind.
pub const FLAGGED_EVENT_CAP: usize = 50;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstructionReport {
    pub colours_used: usize,
    /// Distinct colours before any repair was applied.
    pub colours_used_pre_repair: usize,
    /// Colour-count guarantee the construction aims for at large degree.
    pub theorem_bound: u64,
    pub bound_respected_pre_repair: bool,
    pub resample_counts: BTreeMap<BadEventKind, u64>,
    /// Events still violated when resampling stopped, per kind.
    pub flagged_counts: BTreeMap<BadEventKind, u64>,
    /// First few flagged events with witnesses.
    pub flagged_events: Vec<BadEvent>,
    pub repairs_applied: Vec<RepairEntry>,
    /// Conflicts remaining after repair; zero on success, always checked.
    pub final_conflicts: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ConstructionReport {
    pub(crate) fn flag_all(&mut self, events: &[BadEvent]) {
        for event in events {
            *self.flagged_counts.entry(event.kind).or_insert(0) += 1;
            if self.flagged_events.len() < FLAGGED_EVENT_CAP {
                self.flagged_events.push(event.clone());
            }
        }
    }

    pub(crate) fn empty(theorem_bound: u64) -> ConstructionReport {
        ConstructionReport {
            colours_used: 0,
            colours_used_pre_repair: 0,
            theorem_bound,
            bound_respected_pre_repair: false,
            resample_counts: BTreeMap::new(),
            flagged_counts: BTreeMap::new(),
            flagged_events: Vec::new(),
            repairs_applied: Vec::new(),
            final_conflicts: usize::MAX,
            elapsed: Duration::ZERO,
        }
    }
}

/// Edges with an endpoint within the given distance of any scope vertex —
/// the coins resampled when an event fires.
pub(crate) fn scope_edges(
    graph: &crate::graph::Graph,
    scope_vertices: &[u32],
    distance: u32,
) -> Vec<u32> {
    let mut ball = vec![false; graph.n() as usize];
    let mut frontier: Vec<u32> = Vec::new();
    for &v in scope_vertices {
        if !ball[v as usize] {
            ball[v as usize] = true;
            frontier.push(v);
        }
    }
    for _ in 0..distance {
        let mut next = Vec::new();
        for &v in &frontier {
            for &(w, _) in graph.adjacency(v) {
                if !ball[w as usize] {
                    ball[w as usize] = true;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let mut edges: Vec<u32> = (0..graph.m() as u32)
        .filter(|&e| {
            let (u, v) = graph.endpoints(e);
            ball[u as usize] || ball[v as usize]
        })
        .collect();
    edges.sort_unstable();
    edges
}
