//! Dense two-stage pipeline.
//!
//! Stage one starts from a proper base colouring, uncolours every edge by an
//! independent coin, restores all uncoloured edges around vertices that lost
//! too many (recovery), and classifies vertices by how many incident edges
//! remain uncoloured. Stage two uncolours a few more carefully chosen edges
//! around each palette-poor vertex. A fresh-block extension then completes
//! the colouring; the repair loop erases whatever conflicts survive.
//!
//! Every probability and threshold is an exact ratio derived from
//! `(r, ε, Δ)` — coins are integer draws against the ratio, never floats —
//! so a run is a pure function of the seed. When the derived probability
//! clamps to one (small Δ), resampling coin flips cannot change anything;
//! the pipeline detects such futile events, flags them, and moves on.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num::rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::colouring::{
    palette, symmetric_difference_size, verify_distinguishing_capped, EdgeColouring,
    PartialColouring,
};
use crate::construct::repair::repair_to_zero_conflicts;
use crate::construct::{scope_edges, BadEvent, BadEventKind, ConstructError, ConstructionReport};
use crate::graph::Graph;
use crate::seed::rng_for;
use crate::vizing::{extend_partial, vizing_colour, ColourBlock};

/// Exact probabilities and thresholds; comparisons cross-multiply in `u128`.
pub type Exact = Ratio<u128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensePipelineParams {
    pub r: u32,
    /// Required minimum-to-maximum degree ratio, in (0, 1].
    pub epsilon: Ratio<u32>,
    pub max_degree: u32,
    /// Per-edge uncolour probability `(5r+100)/(ε²Δ)`, clamped to 1.
    pub p_uncolour: Exact,
    pub p_clamped: bool,
    /// Recovery threshold `ε⁻²(7r+200)` on the uncoloured degree.
    pub recover_threshold: Exact,
    /// `3r+15`: below this uncoloured degree a vertex counts as palette-poor.
    pub low_threshold: u32,
    /// `r+5` edges uncoloured per palette-poor vertex in stage two.
    pub stage_two_count: u32,
    /// `2r+10`: required palette symmetric difference.
    pub sym_diff_target: u32,
    /// `ε²Δ/(10r)`: allowed palette-poor neighbours of any vertex.
    pub l_density_cap: Exact,
    pub max_resamples: u64,
    pub seed: u64,
}

impl DensePipelineParams {
    pub fn derive(
        r: u32,
        epsilon: Ratio<u32>,
        max_degree: u32,
        max_resamples: u64,
        seed: u64,
    ) -> DensePipelineParams {
        assert!(r >= 1);
        assert!(epsilon > Ratio::new(0, 1) && epsilon <= Ratio::new(1, 1));
        assert!(max_degree >= 1);
        let p = u128::from(*epsilon.numer());
        let q = u128::from(*epsilon.denom());
        let delta = u128::from(max_degree);
        let raw = Exact::new(q * q * u128::from(5 * r + 100), p * p * delta);
        let one = Exact::new(1, 1);
        let p_clamped = raw > one;
        DensePipelineParams {
            r,
            epsilon,
            max_degree,
            p_uncolour: if p_clamped { one } else { raw },
            p_clamped,
            recover_threshold: Exact::new(q * q * u128::from(7 * r + 200), p * p),
            low_threshold: 3 * r + 15,
            stage_two_count: r + 5,
            sym_diff_target: 2 * r + 10,
            l_density_cap: Exact::new(p * p * delta, q * q * u128::from(10 * r)),
            max_resamples,
            seed,
        }
    }

    /// Fresh-block size for the final extension:
    /// `⌈recover threshold⌉ + (r+4) + 1`.
    pub fn fresh_block_size(&self) -> u64 {
        ceil_u64(self.recover_threshold) + u64::from(self.r) + 5
    }

    /// Colour-count target `Δ + ε⁻²(7r+200) + r + 6`.
    pub fn theorem_bound(&self) -> u64 {
        u64::from(self.max_degree) + ceil_u64(self.recover_threshold) + u64::from(self.r) + 6
    }
}

fn ceil_u64(x: Exact) -> u64 {
    u64::try_from(x.ceil().to_integer()).expect("threshold fits in 64 bits")
}

fn ratio_string(x: &Exact) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl Serialize for DensePipelineParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DensePipelineParams", 12)?;
        s.serialize_field("r", &self.r)?;
        s.serialize_field(
            "epsilon",
            &format!("{}/{}", self.epsilon.numer(), self.epsilon.denom()),
        )?;
        s.serialize_field("maxDegree", &self.max_degree)?;
        s.serialize_field("pUncolour", &ratio_string(&self.p_uncolour))?;
        s.serialize_field("pClamped", &self.p_clamped)?;
        s.serialize_field("recoverThreshold", &ratio_string(&self.recover_threshold))?;
        s.serialize_field("lowThreshold", &self.low_threshold)?;
        s.serialize_field("stageTwoCount", &self.stage_two_count)?;
        s.serialize_field("symDiffTarget", &self.sym_diff_target)?;
        s.serialize_field("lDensityCap", &ratio_string(&self.l_density_cap))?;
        s.serialize_field("maxResamples", &self.max_resamples)?;
        s.serialize_field("seed", &self.seed)?;
        s.end()
    }
}

fn exceeds(count: usize, threshold: &Exact) -> bool {
    Exact::from_integer(count as u128) > *threshold
}

pub(crate) fn bernoulli(rng: &mut ChaCha12Rng, p: &Exact) -> bool {
    rng.gen_range(0..*p.denom()) < *p.numer()
}

/// Entry requirements shared by the pipeline and the event census: no
/// isolated edge, and minimum degree at least `ε·Δ`.
pub(crate) fn entry_guards(
    graph: &Graph,
    params: &DensePipelineParams,
) -> Result<(), ConstructError> {
    if let Some(e) = graph.isolated_edge() {
        let (u, v) = graph.endpoints(e);
        return Err(ConstructError::IsolatedEdge { u, v });
    }
    let delta = u64::from(graph.max_degree());
    let required = u64::from(*params.epsilon.numer()) * delta;
    if u64::from(graph.min_degree()) * u64::from(*params.epsilon.denom()) < required {
        return Err(ConstructError::DegreeRatioViolated {
            min_degree: graph.min_degree(),
            required: format!(
                "{}/{} of {}",
                params.epsilon.numer(),
                params.epsilon.denom(),
                delta
            ),
        });
    }
    Ok(())
}

/// Everything stage one leaves behind. The partial colouring is the base
/// colouring minus the surviving uncoloured edges; the sets classify
/// vertices exactly as the construction's counting argument needs them.
#[derive(Debug, Clone)]
pub struct StageOneState {
    pub base: EdgeColouring,
    pub colouring: PartialColouring,
    /// Edges uncoloured by the coin flips, before recovery.
    pub initial_uncoloured: BTreeSet<u32>,
    /// Vertices whose uncoloured degree exceeded the recovery threshold.
    pub recovered: BTreeSet<u32>,
    /// Vertices with few coin-flip uncolourings.
    pub low_initial: BTreeSet<u32>,
    /// Vertices joined to a recovered vertex by a coin-flip-uncoloured edge.
    pub adjacent_recovered: BTreeSet<u32>,
    /// Palette-poor vertices: few uncoloured edges after recovery.
    pub low: BTreeSet<u32>,
    pub resamples: u64,
    pub event_free: bool,
    pub flagged: Vec<BadEvent>,
    pub resample_counts: BTreeMap<BadEventKind, u64>,
}

pub(crate) struct StageOneSnapshot {
    pub(crate) colouring: PartialColouring,
    pub(crate) recovered: BTreeSet<u32>,
    pub(crate) low_initial: BTreeSet<u32>,
    pub(crate) adjacent_recovered: BTreeSet<u32>,
    pub(crate) low: BTreeSet<u32>,
}

pub(crate) fn apply_coins(
    graph: &Graph,
    params: &DensePipelineParams,
    base: &EdgeColouring,
    coins: &[bool],
) -> StageOneSnapshot {
    let n = graph.n() as usize;
    let mut flip_count = vec![0usize; n];
    for e in 0..graph.m() as u32 {
        if coins[e as usize] {
            let (u, v) = graph.endpoints(e);
            flip_count[u as usize] += 1;
            flip_count[v as usize] += 1;
        }
    }
    let recovered: BTreeSet<u32> = (0..graph.n())
        .filter(|&v| exceeds(flip_count[v as usize], &params.recover_threshold))
        .collect();

    let mut colouring = PartialColouring::from(base);
    let mut uncoloured_after = BTreeSet::new();
    let mut adjacent_recovered = BTreeSet::new();
    for e in 0..graph.m() as u32 {
        if !coins[e as usize] {
            continue;
        }
        let (u, v) = graph.endpoints(e);
        if recovered.contains(&u) || recovered.contains(&v) {
            // Recovery restores the base colour of this edge.
            if recovered.contains(&u) {
                adjacent_recovered.insert(v);
            }
            if recovered.contains(&v) {
                adjacent_recovered.insert(u);
            }
        } else {
            colouring.clear(e);
            uncoloured_after.insert(e);
        }
    }

    let mut after_count = vec![0usize; n];
    for &e in &uncoloured_after {
        let (u, v) = graph.endpoints(e);
        after_count[u as usize] += 1;
        after_count[v as usize] += 1;
    }
    let low_initial: BTreeSet<u32> = (0..graph.n())
        .filter(|&v| (flip_count[v as usize] as u32) < params.low_threshold)
        .collect();
    let low: BTreeSet<u32> = (0..graph.n())
        .filter(|&v| (after_count[v as usize] as u32) < params.low_threshold)
        .collect();

    // Recovery caps every uncoloured degree: a non-recovered vertex was
    // already under the threshold and recovery only removes uncolourings.
    for v in 0..graph.n() {
        assert!(
            !exceeds(after_count[v as usize], &params.recover_threshold),
            "uncoloured degree above the recovery threshold at {v}"
        );
    }
    // A palette-poor vertex is recovered, was born with few uncolourings,
    // or had an uncoloured edge restored by a recovered neighbour.
    for &v in &low {
        assert!(
            recovered.contains(&v) || low_initial.contains(&v) || adjacent_recovered.contains(&v),
            "vertex {v} is palette-poor for no accountable reason"
        );
    }

    StageOneSnapshot {
        colouring,
        recovered,
        low_initial,
        adjacent_recovered,
        low,
    }
}

pub(crate) fn stage_one_events(
    graph: &Graph,
    params: &DensePipelineParams,
    snapshot: &StageOneSnapshot,
    pairs: &[(u32, u32, u32)],
) -> Vec<BadEvent> {
    let mut events = Vec::new();
    for v in 0..graph.n() {
        let in_low = graph
            .adjacency(v)
            .iter()
            .filter(|&&(w, _)| snapshot.low.contains(&w))
            .count();
        if exceeds(in_low, &params.l_density_cap) {
            events.push(BadEvent {
                kind: BadEventKind::DenseNeighbourhoodLoad,
                vertices: vec![v],
                class_index: None,
                witness: format!(
                    "{in_low} palette-poor neighbours, cap {}",
                    ratio_string(&params.l_density_cap)
                ),
            });
        }
    }
    for &(u, v, _) in pairs {
        if snapshot.low.contains(&u) && snapshot.low.contains(&v) {
            continue;
        }
        let diff = symmetric_difference_size(graph, &snapshot.colouring, u, v);
        if (diff as u32) < params.sym_diff_target {
            events.push(BadEvent {
                kind: BadEventKind::DensePaletteSlack,
                vertices: vec![u, v],
                class_index: None,
                witness: format!(
                    "palette symmetric difference {diff}, target {}",
                    params.sym_diff_target
                ),
            });
        }
    }
    events
}

/// Coin-flip uncolouring, recovery and vertex classification, resampling
/// the coins in an event's dependency scope until event-free, flagged as
/// futile (a clamped probability cannot change under resampling), or out of
/// budget.
pub fn stage_one(
    graph: &Graph,
    params: &DensePipelineParams,
) -> Result<StageOneState, ConstructError> {
    entry_guards(graph, params)?;

    let base = vizing_colour(
        graph,
        &ColourBlock::contiguous(1, graph.max_degree() as usize + 1),
    )
    .expect("block of size max degree + 1 always suffices");

    let pairs = graph.same_degree_r_adjacent_pairs(params.r);
    let mut rng = rng_for(params.seed, "stage-one-coins", 0);
    let mut coins: Vec<bool> = (0..graph.m())
        .map(|_| bernoulli(&mut rng, &params.p_uncolour))
        .collect();

    // Resampling a degenerate coin (probability 0 or 1) redraws the exact
    // same value, so events found under it can never clear.
    let futile_coins = params.p_uncolour.is_integer();

    let mut resamples = 0u64;
    let mut resample_counts: BTreeMap<BadEventKind, u64> = BTreeMap::new();
    loop {
        let snapshot = apply_coins(graph, params, &base, &coins);
        let events = stage_one_events(graph, params, &snapshot, &pairs);
        let finish =
            |snapshot: StageOneSnapshot, event_free: bool, flagged: Vec<BadEvent>| StageOneState {
                base: base.clone(),
                colouring: snapshot.colouring,
                initial_uncoloured: coins
                    .iter()
                    .enumerate()
                    .filter(|&(_, &c)| c)
                    .map(|(e, _)| e as u32)
                    .collect(),
                recovered: snapshot.recovered,
                low_initial: snapshot.low_initial,
                adjacent_recovered: snapshot.adjacent_recovered,
                low: snapshot.low,
                resamples,
                event_free,
                flagged,
                resample_counts: resample_counts.clone(),
            };
        if events.is_empty() {
            return Ok(finish(snapshot, true, Vec::new()));
        }
        if futile_coins || resamples >= params.max_resamples {
            return Ok(finish(snapshot, false, events));
        }
        let event = &events[0];
        *resample_counts.entry(event.kind).or_insert(0) += 1;
        resamples += 1;
        for e in scope_edges(graph, &event.vertices, 2) {
            coins[e as usize] = bernoulli(&mut rng, &params.p_uncolour);
        }
    }
}

/// Stage two's product: the further-uncoloured partial colouring plus its
/// own resampling trail.
#[derive(Debug, Clone)]
pub struct StageTwoOutcome {
    pub colouring: PartialColouring,
    /// Edges uncoloured by stage two; each has exactly one palette-poor
    /// endpoint.
    pub second_uncoloured: BTreeSet<u32>,
    /// Palette-poor vertices with fewer eligible edges than requested.
    pub truncated_selections: Vec<u32>,
    pub resamples: u64,
    pub event_free: bool,
    pub flagged: Vec<BadEvent>,
    pub resample_counts: BTreeMap<BadEventKind, u64>,
}

pub(crate) fn eligible_edges(
    graph: &Graph,
    colouring: &PartialColouring,
    low: &BTreeSet<u32>,
    v: u32,
) -> Vec<u32> {
    let mut out: Vec<u32> = graph
        .adjacency(v)
        .iter()
        .filter(|&&(w, e)| colouring.is_coloured(e) && !low.contains(&w))
        .map(|&(_, e)| e)
        .collect();
    out.sort_unstable();
    out
}

pub(crate) fn select(rng: &mut ChaCha12Rng, eligible: &[u32], count: usize) -> Vec<u32> {
    if eligible.len() <= count {
        return eligible.to_vec();
    }
    let picks = rand::seq::index::sample(rng, eligible.len(), count);
    let mut chosen: Vec<u32> = picks.iter().map(|i| eligible[i]).collect();
    chosen.sort_unstable();
    chosen
}

pub(crate) fn stage_two_events(
    graph: &Graph,
    low: &BTreeSet<u32>,
    params: &DensePipelineParams,
    colouring: &PartialColouring,
    second: &BTreeSet<u32>,
    pairs: &[(u32, u32, u32)],
) -> Vec<BadEvent> {
    let mut events = Vec::new();
    let mut hit = vec![0u32; graph.n() as usize];
    for &e in second {
        let (u, v) = graph.endpoints(e);
        hit[u as usize] += 1;
        hit[v as usize] += 1;
    }
    for v in 0..graph.n() {
        if !low.contains(&v) && hit[v as usize] >= params.stage_two_count {
            events.push(BadEvent {
                kind: BadEventKind::StageTwoOverload,
                vertices: vec![v],
                class_index: None,
                witness: format!(
                    "{} edges lost to the second uncolouring, cap {}",
                    hit[v as usize],
                    params.stage_two_count - 1
                ),
            });
        }
    }
    for &(u, v, _) in pairs {
        if low.contains(&u)
            && low.contains(&v)
            && palette(graph, colouring, u) == palette(graph, colouring, v)
        {
            events.push(BadEvent {
                kind: BadEventKind::StageTwoPaletteClash,
                vertices: vec![u, v],
                class_index: None,
                witness: "identical partial palettes".to_string(),
            });
        }
    }
    events
}

/// Uncolours `r+5` eligible edges around each palette-poor vertex (all of
/// them, flagged, when fewer exist), then resamples the selections of the
/// vertices involved in any violated event. An event whose involved
/// selections are all forced can never clear and is flagged instead.
pub fn stage_two(
    graph: &Graph,
    state: &StageOneState,
    params: &DensePipelineParams,
) -> StageTwoOutcome {
    let count = params.stage_two_count as usize;
    let mut outcome = StageTwoOutcome {
        colouring: state.colouring.clone(),
        second_uncoloured: BTreeSet::new(),
        truncated_selections: Vec::new(),
        resamples: 0,
        event_free: true,
        flagged: Vec::new(),
        resample_counts: BTreeMap::new(),
    };
    if state.low.is_empty() {
        return outcome;
    }

    let mut rng = rng_for(params.seed, "stage-two-picks", 0);
    let eligible: BTreeMap<u32, Vec<u32>> = state
        .low
        .iter()
        .map(|&v| (v, eligible_edges(graph, &state.colouring, &state.low, v)))
        .collect();
    let mut selections: BTreeMap<u32, Vec<u32>> = eligible
        .iter()
        .map(|(&v, edges)| (v, select(&mut rng, edges, count)))
        .collect();
    for (&v, edges) in &eligible {
        if edges.len() < count {
            outcome.truncated_selections.push(v);
        }
    }
    let forced: BTreeSet<u32> = eligible
        .iter()
        .filter(|(_, edges)| edges.len() <= count)
        .map(|(&v, _)| v)
        .collect();

    let pairs = graph.same_degree_r_adjacent_pairs(params.r);
    loop {
        let second: BTreeSet<u32> = selections.values().flatten().copied().collect();
        let mut colouring = state.colouring.clone();
        for &e in &second {
            let (u, v) = graph.endpoints(e);
            let u_low = state.low.contains(&u);
            let v_low = state.low.contains(&v);
            assert!(
                u_low != v_low,
                "second-stage uncoloured edge must join a palette-poor vertex to a rich one"
            );
            colouring.clear(e);
        }
        let events = stage_two_events(graph, &state.low, params, &colouring, &second, &pairs);
        if events.is_empty() {
            outcome.colouring = colouring;
            outcome.second_uncoloured = second;
            outcome.event_free = true;
            return outcome;
        }

        // Involved palette-poor vertices per event; an event is futile when
        // all of them have forced selections.
        let involved = |event: &BadEvent| -> Vec<u32> {
            match event.kind {
                BadEventKind::StageTwoOverload => {
                    let u = event.vertices[0];
                    graph
                        .adjacency(u)
                        .iter()
                        .filter(|&&(_, e)| second.contains(&e))
                        .map(|&(w, _)| w)
                        .filter(|w| state.low.contains(w))
                        .collect()
                }
                _ => event
                    .vertices
                    .iter()
                    .copied()
                    .filter(|v| state.low.contains(v))
                    .collect(),
            }
        };
        let actionable = events
            .iter()
            .find(|e| involved(e).iter().any(|v| !forced.contains(v)));
        match actionable {
            Some(event) if outcome.resamples < params.max_resamples => {
                *outcome.resample_counts.entry(event.kind).or_insert(0) += 1;
                outcome.resamples += 1;
                for v in involved(event) {
                    if !forced.contains(&v) {
                        let edges = &eligible[&v];
                        selections.insert(v, select(&mut rng, edges, count));
                    }
                }
            }
            _ => {
                outcome.colouring = colouring;
                outcome.second_uncoloured = second;
                outcome.event_free = false;
                outcome.flagged = events;
                return outcome;
            }
        }
    }
}

/// Full dense pipeline: stage one, stage two, fresh-block completion,
/// verification and repair. The returned colouring is always proper with
/// zero conflicts at distance `r`.
pub fn construct_dense(
    graph: &Graph,
    r: u32,
    epsilon: Ratio<u32>,
    seed: u64,
    max_resamples: u64,
) -> Result<(EdgeColouring, ConstructionReport), ConstructError> {
    let start = Instant::now();
    let params = DensePipelineParams::derive(r, epsilon, graph.max_degree(), max_resamples, seed);
    let state = stage_one(graph, &params)?;
    let two = stage_two(graph, &state, &params);

    let mut report = ConstructionReport::empty(params.theorem_bound());
    for (kind, n) in state
        .resample_counts
        .iter()
        .chain(two.resample_counts.iter())
    {
        *report.resample_counts.entry(*kind).or_insert(0) += n;
    }
    report.flag_all(&state.flagged);
    report.flag_all(&two.flagged);

    // Fresh block after the base block; big enough for both the guarantee
    // and whatever uncoloured degree the flagged paths left behind.
    let uncoloured = two.colouring.uncoloured();
    let mut sub_degree = vec![0u32; graph.n() as usize];
    for &e in &uncoloured {
        let (u, v) = graph.endpoints(e);
        sub_degree[u as usize] += 1;
        sub_degree[v as usize] += 1;
    }
    let needed = u64::from(sub_degree.iter().copied().max().unwrap_or(0)) + 1;
    let block_len = params.fresh_block_size().max(needed) as usize;
    let block = ColourBlock::contiguous(graph.max_degree() + 2, block_len);
    let extended = extend_partial(graph, &two.colouring, &block)
        .expect("fresh block is disjoint and large enough by construction");

    report.colours_used_pre_repair = extended.colour_count();
    report.bound_respected_pre_repair =
        report.colours_used_pre_repair as u64 <= report.theorem_bound;

    let mut final_colouring = extended;
    let next_fresh = block
        .colours()
        .last()
        .copied()
        .expect("fresh block is never empty")
        .max(final_colouring.max_colour())
        + 1;
    report.repairs_applied = repair_to_zero_conflicts(graph, &mut final_colouring, r, next_fresh);
    report.colours_used = final_colouring.colour_count();

    let check = verify_distinguishing_capped(graph, &final_colouring, r, usize::MAX)
        .expect("verification preconditions hold");
    assert!(check.proper, "pipeline output must be proper");
    report.final_conflicts = check.conflict_count;
    assert_eq!(
        report.final_conflicts, 0,
        "repair must erase every conflict"
    );
    report.elapsed = start.elapsed();
    Ok((final_colouring, report))
}
