//! Class-partition pipeline for large maximum degree.
//!
//! Edges draw a uniform class index among `t = ⌈Δ/ln⁴Δ⌉` classes; each class
//! is properly coloured inside its own first block, a coin flip uncolours
//! each edge with probability `2/ln Δ`, and the uncoloured part of each
//! class is recoloured inside the class's second block. Class blocks are
//! pairwise disjoint, so whatever survives is proper, and every edge's final
//! colour stays inside its own class's colours (extended, when a flagged run
//! overloads a block or the repair loop needs fresh colours, by tail colours
//! recorded against that class).
//!
//! Both random stages run the same resample loop as the dense pipeline:
//! find the first violated event, redraw the randomness in its dependency
//! scope, repeat. With a single class the index redraw cannot change
//! anything, and a clamped coin probability cannot either; such events are
//! flagged as futile instead of burning budget.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::colouring::{
    palette, verify_distinguishing_capped, ColourMap, EdgeColouring, PartialColouring,
};
use crate::construct::repair::repair_to_zero_conflicts;
use crate::construct::{scope_edges, BadEvent, BadEventKind, ConstructError, ConstructionReport};
use crate::graph::Graph;
use crate::seed::rng_for;
use crate::vizing::{vizing_on_subgraph, ColourBlock};

/// Class layout derived from the maximum degree alone, plus the per-edge
/// class draw and any extension colours granted during a run.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AsymptoticPlan {
    pub max_degree: u32,
    /// Number of classes `⌈Δ/ln⁴Δ⌉`.
    pub t: u32,
    /// First-block size `⌈ln⁴Δ⌉ + ⌈ln³Δ⌉ + 1`.
    pub s_prime: u32,
    /// Second-block size `4⌈ln³Δ⌉ + 1`.
    pub s_second: u32,
    /// Combined per-class budget.
    pub s: u32,
    /// Colour-count target `t·s`.
    pub theorem_bound: u64,
    pub ln3: f64,
    pub ln4: f64,
    /// Class index per edge; empty until a run fills it.
    pub q: Vec<u32>,
    /// Extra colours granted to a class beyond its two blocks.
    pub extensions: BTreeMap<u32, Vec<u32>>,
}

impl AsymptoticPlan {
    /// Smallest admissible maximum degree: `ln³Δ ≥ 2` first holds at 4.
    pub const DEGREE_FLOOR: u32 = 4;

    pub fn derive(max_degree: u32) -> Result<AsymptoticPlan, ConstructError> {
        let ln1 = f64::from(max_degree.max(1)).ln();
        let ln3 = ln1.powi(3);
        let ln4 = ln1.powi(4);
        if ln3 < 2.0 {
            return Err(ConstructError::DeltaBelowFloor {
                max_degree,
                floor: AsymptoticPlan::DEGREE_FLOOR,
            });
        }
        let t = (f64::from(max_degree) / ln4).ceil() as u32;
        let s_prime = ln4.ceil() as u32 + ln3.ceil() as u32 + 1;
        let s_second = 4 * ln3.ceil() as u32 + 1;
        let s = s_prime + s_second;
        Ok(AsymptoticPlan {
            max_degree,
            t,
            s_prime,
            s_second,
            s,
            theorem_bound: u64::from(t) * u64::from(s),
            ln3,
            ln4,
            q: Vec::new(),
            extensions: BTreeMap::new(),
        })
    }

    fn class_start(&self, i: u32) -> u32 {
        1 + i * self.s
    }

    /// Block the class is first coloured from.
    pub fn index_block(&self, i: u32) -> ColourBlock {
        ColourBlock::contiguous(self.class_start(i), self.s_prime as usize)
    }

    /// Block the class's uncoloured part is recoloured from.
    pub fn recolour_block(&self, i: u32) -> ColourBlock {
        ColourBlock::contiguous(self.class_start(i) + self.s_prime, self.s_second as usize)
    }

    /// All colours a class-`i` edge may legitimately carry.
    pub fn class_colours(&self, i: u32) -> BTreeSet<u32> {
        let mut set: BTreeSet<u32> = (self.class_start(i)..self.class_start(i) + self.s).collect();
        if let Some(extra) = self.extensions.get(&i) {
            set.extend(extra.iter().copied());
        }
        set
    }
}

fn class_degrees(graph: &Graph, q: &[u32], t: u32) -> Vec<Vec<u32>> {
    let mut counts = vec![vec![0u32; t as usize]; graph.n() as usize];
    for e in 0..graph.m() as u32 {
        let (u, v) = graph.endpoints(e);
        counts[u as usize][q[e as usize] as usize] += 1;
        counts[v as usize][q[e as usize] as usize] += 1;
    }
    counts
}

fn index_events(
    graph: &Graph,
    plan: &AsymptoticPlan,
    q: &[u32],
    pairs: &[(u32, u32, u32)],
) -> Vec<BadEvent> {
    let mut events = Vec::new();
    let index_set = |v: u32| -> BTreeSet<u32> {
        graph
            .adjacency(v)
            .iter()
            .map(|&(_, e)| q[e as usize])
            .collect()
    };
    for &(u, v, _) in pairs {
        if f64::from(graph.degree(u)) <= plan.ln3 && index_set(u) == index_set(v) {
            events.push(BadEvent {
                kind: BadEventKind::IndexPaletteClash,
                vertices: vec![u, v],
                class_index: None,
                witness: "identical class-index sets".to_string(),
            });
        }
    }
    let counts = class_degrees(graph, q, plan.t);
    let cap = plan.ln4 + plan.ln3;
    for v in 0..graph.n() {
        for i in 0..plan.t {
            let c = counts[v as usize][i as usize];
            if f64::from(c) > cap {
                events.push(BadEvent {
                    kind: BadEventKind::IndexClassOverload,
                    vertices: vec![v],
                    class_index: Some(i),
                    witness: format!("class degree {c}, cap {cap:.2}"),
                });
            }
        }
    }
    events
}

fn uncolour_events(
    graph: &Graph,
    plan: &AsymptoticPlan,
    q: &[u32],
    coins: &[bool],
    colouring: &PartialColouring,
    pairs: &[(u32, u32, u32)],
) -> Vec<BadEvent> {
    let ln1 = f64::from(graph.max_degree()).ln();
    let mut events = Vec::new();
    let mut u_count = vec![0u32; graph.n() as usize];
    let mut u_class = vec![BTreeMap::<u32, u32>::new(); graph.n() as usize];
    for e in 0..graph.m() as u32 {
        if coins[e as usize] {
            let (u, v) = graph.endpoints(e);
            u_count[u as usize] += 1;
            u_count[v as usize] += 1;
            *u_class[u as usize].entry(q[e as usize]).or_insert(0) += 1;
            *u_class[v as usize].entry(q[e as usize]).or_insert(0) += 1;
        }
    }
    for v in 0..graph.n() {
        let d = f64::from(graph.degree(v));
        if d >= plan.ln3 {
            let drift = (f64::from(u_count[v as usize]) - 2.0 * d / ln1).abs();
            if drift > d / ln1 {
                events.push(BadEvent {
                    kind: BadEventKind::UncolourConcentration,
                    vertices: vec![v],
                    class_index: None,
                    witness: format!(
                        "{} uncoloured, expected {:.2} ± {:.2}",
                        u_count[v as usize],
                        2.0 * d / ln1,
                        d / ln1
                    ),
                });
            }
        }
    }
    for v in 0..graph.n() {
        for (&i, &c) in &u_class[v as usize] {
            if f64::from(c) > 4.0 * plan.ln3 {
                events.push(BadEvent {
                    kind: BadEventKind::UncolourClassOverload,
                    vertices: vec![v],
                    class_index: Some(i),
                    witness: format!("{c} uncoloured in one class, cap {:.2}", 4.0 * plan.ln3),
                });
            }
        }
    }
    for &(u, v, _) in pairs {
        if f64::from(graph.degree(u)) >= plan.ln3
            && palette(graph, colouring, u) == palette(graph, colouring, v)
        {
            events.push(BadEvent {
                kind: BadEventKind::FinalPaletteClash,
                vertices: vec![u, v],
                class_index: None,
                witness: "identical partial palettes".to_string(),
            });
        }
    }
    events
}

/// Colours every edge of `edge_set` from the class block, growing the block
/// with globally fresh colours when the subgraph needs more (only flagged
/// runs do), and records any growth against the class.
fn colour_class(
    graph: &Graph,
    plan: &mut AsymptoticPlan,
    class: u32,
    edge_set: &[u32],
    block: ColourBlock,
    fresh: &mut u32,
    target: &mut PartialColouring,
) {
    if edge_set.is_empty() {
        return;
    }
    let mut degree = vec![0u32; graph.n() as usize];
    for &e in edge_set {
        let (u, v) = graph.endpoints(e);
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let needed = degree.into_iter().max().unwrap_or(0) as usize + 1;
    let mut colours = block.colours().to_vec();
    while colours.len() < needed {
        colours.push(*fresh);
        plan.extensions.entry(class).or_default().push(*fresh);
        *fresh += 1;
    }
    let block = ColourBlock::new(colours);
    let sub = vizing_on_subgraph(graph, edge_set, &block)
        .expect("block was grown to the subgraph's requirement");
    for &e in edge_set {
        target.set(e, sub.colour(e).expect("subset edge coloured"));
    }
}

/// Full class-partition pipeline. Returns the colouring, the filled-in
/// plan (class draw and extensions included) and the run report.
pub fn construct_asymptotic(
    graph: &Graph,
    r: u32,
    seed: u64,
    max_resamples: u64,
) -> Result<(EdgeColouring, AsymptoticPlan, ConstructionReport), ConstructError> {
    assert!(r >= 1);
    let start = Instant::now();
    if let Some(e) = graph.isolated_edge() {
        let (u, v) = graph.endpoints(e);
        return Err(ConstructError::IsolatedEdge { u, v });
    }
    let mut plan = AsymptoticPlan::derive(graph.max_degree())?;
    if graph.min_degree() < r + 2 {
        return Err(ConstructError::MinDegreeTooSmall {
            min_degree: graph.min_degree(),
            required: r + 2,
        });
    }

    let m = graph.m();
    let pairs = graph.same_degree_r_adjacent_pairs(r);
    let mut report = ConstructionReport::empty(plan.theorem_bound);
    let mut resamples = 0u64;

    // Class draw, resampled until the index events clear. A single class
    // makes every redraw a no-op, so events are then flagged wholesale.
    let mut rng_q = rng_for(seed, "class-draws", 0);
    let mut q: Vec<u32> = (0..m).map(|_| rng_q.gen_range(0..plan.t)).collect();
    loop {
        let events = index_events(graph, &plan, &q, &pairs);
        if events.is_empty() {
            break;
        }
        if plan.t == 1 || resamples >= max_resamples {
            report.flag_all(&events);
            break;
        }
        let event = &events[0];
        *report.resample_counts.entry(event.kind).or_insert(0) += 1;
        resamples += 1;
        for e in scope_edges(graph, &event.vertices, 2) {
            q[e as usize] = rng_q.gen_range(0..plan.t);
        }
    }

    // First colouring: each class properly coloured inside its own block.
    let mut coloured = PartialColouring::empty(m);
    let mut fresh = 1 + plan.t * plan.s;
    for i in 0..plan.t {
        let class_edges: Vec<u32> = (0..m as u32).filter(|&e| q[e as usize] == i).collect();
        let block = plan.index_block(i);
        colour_class(
            graph,
            &mut plan,
            i,
            &class_edges,
            block,
            &mut fresh,
            &mut coloured,
        );
    }

    // Uncolouring coins, resampled until the concentration, overload and
    // clash events clear. `2/ln Δ` clamps to 1 below Δ = 8, where a redraw
    // is again a no-op.
    let p2 = 2.0 / f64::from(graph.max_degree()).ln();
    let clamped = p2 >= 1.0;
    let mut rng_u = rng_for(seed, "uncolour-coins", 0);
    let flip = |rng: &mut rand_chacha::ChaCha12Rng| clamped || rng.gen::<f64>() < p2;
    let mut coins: Vec<bool> = (0..m).map(|_| flip(&mut rng_u)).collect();
    let partial_after = |coins: &[bool]| {
        let mut c = coloured.clone();
        for e in 0..m as u32 {
            if coins[e as usize] {
                c.clear(e);
            }
        }
        c
    };
    let mut partial = partial_after(&coins);
    loop {
        let events = uncolour_events(graph, &plan, &q, &coins, &partial, &pairs);
        if events.is_empty() {
            break;
        }
        if clamped || resamples >= max_resamples {
            report.flag_all(&events);
            break;
        }
        let event = &events[0];
        *report.resample_counts.entry(event.kind).or_insert(0) += 1;
        resamples += 1;
        for e in scope_edges(graph, &event.vertices, 2) {
            coins[e as usize] = flip(&mut rng_u);
        }
        partial = partial_after(&coins);
    }

    // Recolour each class's uncoloured part from its second block.
    for i in 0..plan.t {
        let class_unc: Vec<u32> = partial
            .uncoloured()
            .into_iter()
            .filter(|&e| q[e as usize] == i)
            .collect();
        let block = plan.recolour_block(i);
        colour_class(
            graph,
            &mut plan,
            i,
            &class_unc,
            block,
            &mut fresh,
            &mut partial,
        );
    }
    let mut colouring = partial
        .into_total()
        .expect("every class edge was recoloured");

    report.colours_used_pre_repair = colouring.colour_count();
    report.bound_respected_pre_repair =
        report.colours_used_pre_repair as u64 <= report.theorem_bound;

    let entries = repair_to_zero_conflicts(graph, &mut colouring, r, fresh);
    for entry in &entries {
        plan.extensions
            .entry(q[entry.edge as usize])
            .or_default()
            .push(entry.colour);
    }
    report.repairs_applied = entries;
    report.colours_used = colouring.colour_count();

    let check = verify_distinguishing_capped(graph, &colouring, r, usize::MAX)
        .expect("verification preconditions hold");
    assert!(check.proper, "pipeline output must be proper");
    report.final_conflicts = check.conflict_count;
    assert_eq!(
        report.final_conflicts, 0,
        "repair must erase every conflict"
    );
    report.elapsed = start.elapsed();
    plan.q = q;
    Ok((colouring, plan, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::is_proper;
    use crate::graph::{gen_complete, gen_random_regular, gen_star};

    #[test]
    fn plan_arithmetic_at_small_degree() {
        let plan = AsymptoticPlan::derive(40).unwrap();
        assert_eq!(plan.t, 1);
        assert_eq!(plan.s_prime, 186 + 51 + 1);
        assert_eq!(plan.s_second, 4 * 51 + 1);
        assert_eq!(plan.s, plan.s_prime + plan.s_second);
        assert_eq!(plan.theorem_bound, u64::from(plan.s));
        let first = plan.index_block(0);
        let second = plan.recolour_block(0);
        assert_eq!(first.colours().first(), Some(&1));
        assert_eq!(second.colours().first(), Some(&(1 + plan.s_prime)));
        assert!(first.colours().iter().all(|c| !second.contains(*c)));
    }

    #[test]
    fn plan_splits_into_two_classes_at_six_thousand() {
        let plan = AsymptoticPlan::derive(6000).unwrap();
        assert_eq!(plan.t, 2);
        let blocks = [
            plan.index_block(0),
            plan.recolour_block(0),
            plan.index_block(1),
            plan.recolour_block(1),
        ];
        assert_eq!(blocks[0].len(), plan.s_prime as usize);
        assert_eq!(blocks[1].len(), plan.s_second as usize);
        let mut seen = BTreeSet::new();
        for b in &blocks {
            for &c in b.colours() {
                assert!(seen.insert(c), "blocks must be pairwise disjoint");
            }
        }
        assert_eq!(seen.len(), (2 * plan.s) as usize);
        assert_eq!(seen.iter().max(), Some(&(2 * plan.s)));
        assert_eq!(plan.theorem_bound, u64::from(plan.t) * u64::from(plan.s));
    }

    #[test]
    fn degree_floor_guard() {
        assert!(matches!(
            AsymptoticPlan::derive(3),
            Err(ConstructError::DeltaBelowFloor {
                max_degree: 3,
                floor: 4
            })
        ));
        assert!(AsymptoticPlan::derive(4).is_ok());
        let g = gen_complete(4).unwrap();
        let err = construct_asymptotic(&g, 1, 5, 10).unwrap_err();
        assert!(matches!(
            err,
            ConstructError::DeltaBelowFloor { max_degree: 3, .. }
        ));
    }

    #[test]
    fn min_degree_guard() {
        let star = gen_star(6).unwrap();
        let err = construct_asymptotic(&star, 1, 5, 10).unwrap_err();
        assert_eq!(
            err,
            ConstructError::MinDegreeTooSmall {
                min_degree: 1,
                required: 3
            }
        );
    }

    #[test]
    fn single_class_run_is_clean_and_flags_index_clashes() {
        let g = gen_random_regular(100, 40, 23).unwrap();
        let (colouring, plan, report) = construct_asymptotic(&g, 2, 23, 500).unwrap();
        assert!(is_proper(&g, &colouring).is_ok());
        assert_eq!(report.final_conflicts, 0);
        assert!(report.bound_respected_pre_repair);
        assert!(report.colours_used_pre_repair as u64 <= plan.theorem_bound);

        // One class: every same-degree nearby pair shares the index set
        // {0}, each such event is futile, and no budget is burnt on them.
        assert_eq!(plan.t, 1);
        assert!(report.flagged_counts[&BadEventKind::IndexPaletteClash] > 0);
        assert_eq!(
            report
                .resample_counts
                .get(&BadEventKind::IndexPaletteClash)
                .copied()
                .unwrap_or(0),
            0
        );

        // Degrees sit below ln³Δ, so every uncolouring event is vacuous.
        for kind in [
            BadEventKind::UncolourConcentration,
            BadEventKind::UncolourClassOverload,
            BadEventKind::FinalPaletteClash,
        ] {
            assert!(!report.flagged_counts.contains_key(&kind));
            assert!(!report.resample_counts.contains_key(&kind));
        }

        // Every edge's colour stays inside its own class's colours.
        for e in 0..g.m() as u32 {
            let allowed = plan.class_colours(plan.q[e as usize]);
            assert!(allowed.contains(&colouring.get(e)));
        }
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let g = gen_random_regular(20, 12, 31).unwrap();
        let (a, pa, _) = construct_asymptotic(&g, 1, 77, 200).unwrap();
        let (b, pb, _) = construct_asymptotic(&g, 1, 77, 200).unwrap();
        assert_eq!(a, b);
        assert_eq!(pa.q, pb.q);
        assert_eq!(pa.extensions, pb.extensions);
    }
}
