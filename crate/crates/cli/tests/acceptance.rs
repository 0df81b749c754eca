//! Acceptance gate: nine end-to-end checks with pinned values, tolerances
//! and time budgets. Each prints one `ACCEPTANCE n: PASS` line on success
//! (visible under `--nocapture`); any failure keeps the line from printing.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num::bigint::BigInt;
use num::rational::Ratio;
use num::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use chromadist_core::colouring::{is_proper, verify_distinguishing_capped, EdgeColouring};
use chromadist_core::construct::{
    construct_asymptotic, construct_dense, stage_one, DensePipelineParams,
};
use chromadist_core::extremal::{
    asymptotic_margin_check, binomial_bounds_check, certificate_threshold, observation2_check,
    palette_count_certificate, CertOutcome,
};
use chromadist_core::graph::{
    gen_complete, gen_cycle, gen_de_bruijn, gen_lower_bound_instance, gen_path, gen_random_regular,
    gen_star, DeBruijnSpec, Graph,
};
use chromadist_core::io::{read_graph_stream, write_graph_stream};
use chromadist_core::seed::{derive_seed, rng_for};
use chromadist_core::solver::{chi_exact, conjecture_scan, BoundForm, SolverConfig, SolverStatus};
use chromadist_core::vizing::{vizing_colour, ColourBlock};

use chromadist::args::Suite;
use chromadist::bench;
use chromadist::corpus::small_connected_corpus;

const MASTER_SEED: u64 = 20_260_822;

fn pass(n: u32, detail: &str) {
    println!("ACCEPTANCE {n}: PASS — {detail}");
}

/// Random simple graph with at least one edge; optionally rejects graphs
/// whose edge set contains an isolated edge.
fn random_graph(rng: &mut impl Rng, max_n: u32, forbid_isolated_edge: bool) -> Graph {
    loop {
        let n = rng.gen_range(3..=max_n);
        let p: f64 = rng.gen_range(0.08..0.6);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let graph = Graph::from_edges_with_n(n, &edges).expect("pairs are distinct");
        if forbid_isolated_edge && graph.isolated_edge().is_some() {
            continue;
        }
        return graph;
    }
}

/// Proper colouring with scrambled colour names: a fan colouring pushed
/// through a random bijection into a possibly shifted range.
fn scrambled_proper_colouring(rng: &mut impl Rng, graph: &Graph) -> EdgeColouring {
    let width = graph.max_degree() + 1;
    let block = ColourBlock::contiguous(1, width as usize);
    let base = vizing_colour(graph, &block).expect("Δ+1 colours always suffice");
    let shift = rng.gen_range(0..3u32) * 7;
    let mut names: Vec<u32> = (1..=width).map(|c| c + shift).collect();
    names.shuffle(rng);
    let colours: Vec<u32> = (0..graph.m() as u32)
        .map(|e| names[(base.get(e) - 1) as usize])
        .collect();
    EdgeColouring::new(colours)
}

fn bfs_distances(graph: &Graph, source: u32) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.n() as usize];
    dist[source as usize] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in graph.adjacency(v) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// The definition, executed literally: all-pairs shortest paths, then a
/// palette-set comparison for every pair at distance 1..=r. No properness
/// shortcut, no degree filter.
fn definitional_conflicts(
    graph: &Graph,
    colouring: &EdgeColouring,
    r: u32,
) -> Vec<(u32, u32, u32)> {
    let palettes: Vec<BTreeSet<u32>> = (0..graph.n())
        .map(|v| {
            graph
                .adjacency(v)
                .iter()
                .map(|&(_, e)| colouring.get(e))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for u in 0..graph.n() {
        let dist = bfs_distances(graph, u);
        for v in (u + 1)..graph.n() {
            let d = dist[v as usize];
            if (1..=r).contains(&d) && palettes[u as usize] == palettes[v as usize] {
                out.push((u, v, d));
            }
        }
    }
    out
}

#[test]
fn acceptance_1_verifier_agrees_with_the_definition() {
    let started = Instant::now();
    let mut rng = rng_for(MASTER_SEED, "acceptance-oracle", 1);
    let mut with_conflicts = 0usize;
    for _ in 0..500 {
        let graph = random_graph(&mut rng, 30, true);
        let colouring = scrambled_proper_colouring(&mut rng, &graph);
        let r = rng.gen_range(1..=5);
        let report = verify_distinguishing_capped(&graph, &colouring, r, usize::MAX)
            .expect("generation rejects isolated edges");
        let expected = definitional_conflicts(&graph, &colouring, r);
        assert!(report.proper, "fan colourings are proper");
        assert_eq!(report.conflict_count, expected.len());
        let got: Vec<(u32, u32, u32)> = report
            .conflicts
            .iter()
            .map(|c| (c.u, c.v, c.dist))
            .collect();
        assert_eq!(got, expected);
        if !expected.is_empty() {
            with_conflicts += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    assert!(with_conflicts > 0, "the sample must exercise both outcomes");
    pass(
        1,
        &format!("500 random triples, zero discrepancies ({with_conflicts} had conflicts), {elapsed:.2?}"),
    );
}

#[test]
fn acceptance_2_exact_values_and_small_corpus_scan() {
    let config = SolverConfig::default();
    let mut timings = Vec::new();
    for (graph, expected, name) in [
        (gen_cycle(5).unwrap(), 5, "the 5-cycle"),
        (gen_complete(3).unwrap(), 3, "the triangle"),
        (gen_path(3).unwrap(), 2, "the 2-edge path"),
    ] {
        let started = Instant::now();
        let result = chi_exact(&graph, 1, &config).unwrap();
        let elapsed = started.elapsed();
        assert_eq!(result.status, SolverStatus::Exact, "{name}");
        assert_eq!(result.value, expected, "{name}");
        assert!(elapsed < Duration::from_secs(1), "{name} took {elapsed:?}");
        timings.push(elapsed);
    }

    // Four colours must be refuted exhaustively on the 5-cycle, not timed out.
    let capped = SolverConfig {
        k_max: 4,
        ..SolverConfig::default()
    };
    let refuted = chi_exact(&gen_cycle(5).unwrap(), 1, &capped).unwrap();
    assert_eq!(refuted.status, SolverStatus::LowerBoundOnly);
    assert_eq!(refuted.value, 5);
    assert!(refuted.witness.is_none());
    assert!(refuted.nodes_explored > 0);

    // Scan of every connected graph on at most 6 vertices, through a file.
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus6.edges");
    write_graph_stream(&path, &small_connected_corpus(6)).unwrap();
    let graphs = read_graph_stream(&path).unwrap();
    assert_eq!(graphs.len(), 142);
    let report = conjecture_scan(&graphs, 1, BoundForm::DeltaPlusTwo, &config);
    assert_eq!(report.violations, 0);
    assert_eq!(report.timed_out, 0);
    assert_eq!(report.excluded, 1, "only the single-edge graph is excluded");
    let over: Vec<_> = report.records.iter().filter(|rec| rec.exceeds).collect();
    assert_eq!(over.len(), 1, "only the 5-cycle may exceed Δ+2");
    assert!(over[0].whitelisted && over[0].n == 5 && over[0].m == 5);
    let scan_elapsed = started.elapsed();
    assert!(
        scan_elapsed < Duration::from_secs(600),
        "scan took {scan_elapsed:?}"
    );
    pass(
        2,
        &format!(
            "pinned values {timings:.2?}; 142-graph scan clean except the whitelisted 5-cycle, {scan_elapsed:.2?}"
        ),
    );
}

#[test]
fn acceptance_3_value_never_drops_as_distance_grows() {
    let config = SolverConfig::default();
    let mut cells = 0usize;
    let mut graphs = 0usize;
    for graph in &small_connected_corpus(6) {
        if graph.isolated_edge().is_some() {
            continue; // the single-edge graph has no defined value
        }
        graphs += 1;
        let diameter = graph.diameter().expect("corpus graphs are connected");
        let mut previous = 0;
        for r in 1..=diameter {
            let result = chi_exact(graph, r, &config).unwrap();
            assert_eq!(result.status, SolverStatus::Exact);
            assert!(
                result.value >= previous,
                "value dropped {previous} → {} at r={r} on n={} m={} edges {:?}",
                result.value,
                graph.n(),
                graph.m(),
                graph.edges(),
            );
            previous = result.value;
            cells += 1;
        }
    }
    pass(
        3,
        &format!("non-decreasing on all {cells} (graph, r) cells over {graphs} graphs"),
    );
}

#[test]
fn acceptance_4_fan_colourings_stay_within_delta_plus_one() {
    let started = Instant::now();
    let mut rng = rng_for(MASTER_SEED, "acceptance-fans", 4);
    let mut graphs: Vec<Graph> = (0..200)
        .map(|_| random_graph(&mut rng, 40, false))
        .collect();
    for n in [2u32, 7, 16, 33] {
        graphs.push(gen_path(n).unwrap());
    }
    for n in [3u32, 8, 21] {
        graphs.push(gen_cycle(n).unwrap());
    }
    for n in [4u32, 11, 30] {
        graphs.push(gen_star(n).unwrap());
    }
    for n in [3u32, 6, 10] {
        graphs.push(gen_complete(n).unwrap());
    }
    for (t, k) in [(2u32, 3u32), (3, 2), (4, 2)] {
        graphs.push(gen_de_bruijn(DeBruijnSpec::new(t, k)).unwrap());
    }
    for (n, d, seed) in [(24u32, 6u32, 1u64), (36, 5, 2), (40, 13, 3)] {
        graphs.push(gen_random_regular(n, d, seed).unwrap());
    }
    for graph in &graphs {
        let block = ColourBlock::contiguous(1, graph.max_degree() as usize + 1);
        let colouring = vizing_colour(graph, &block).unwrap();
        assert!(is_proper(graph, &colouring).is_ok());
        assert!(colouring.colour_count() <= graph.max_degree() as usize + 1);
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        4,
        &format!(
            "{} graphs coloured properly within Δ+1, {elapsed:.2?}",
            graphs.len()
        ),
    );
}

#[test]
fn acceptance_5_dense_pipeline_hard_postconditions() {
    let epsilon = Ratio::from_integer(1);
    let mut cells = Vec::new();
    'fill: loop {
        for (d, n) in [(8u32, 100u32), (8, 200), (12, 100), (12, 200)] {
            for r in [1u32, 2] {
                cells.push((d, n, r));
                if cells.len() == 20 {
                    break 'fill;
                }
            }
        }
    }
    let mut slowest = Duration::ZERO;
    for (run, &(d, n, r)) in cells.iter().enumerate() {
        let started = Instant::now();
        let graph_seed = derive_seed(MASTER_SEED, "acceptance-dense-graph", run as u64);
        let run_seed = derive_seed(MASTER_SEED, "acceptance-dense-run", run as u64);
        let graph = gen_random_regular(n, d, graph_seed).unwrap();
        let budget = 50 * graph.m() as u64;
        let (colouring, report) = construct_dense(&graph, r, epsilon, run_seed, budget).unwrap();

        assert!(is_proper(&graph, &colouring).is_ok());
        assert_eq!(report.final_conflicts, 0);
        let recheck = verify_distinguishing_capped(&graph, &colouring, r, 10).unwrap();
        assert!(recheck.proper && recheck.conflict_count == 0);

        // Post-recovery uncoloured degree is capped at every vertex, and the
        // palette-poor set is covered by the three structural sets.
        let cap = u64::from(7 * r + 200);
        let params = DensePipelineParams::derive(r, epsilon, graph.max_degree(), budget, run_seed);
        let state = stage_one(&graph, &params).unwrap();
        let mut uncoloured_degree = vec![0u64; graph.n() as usize];
        for e in state.colouring.uncoloured() {
            let (u, v) = graph.endpoints(e);
            uncoloured_degree[u as usize] += 1;
            uncoloured_degree[v as usize] += 1;
        }
        assert!(uncoloured_degree.iter().all(|&x| x <= cap));
        assert!(state.low.iter().all(|v| {
            state.recovered.contains(v)
                || state.low_initial.contains(v)
                || state.adjacent_recovered.contains(v)
        }));

        let bound = u64::from(graph.max_degree()) + cap + u64::from(r) + 6;
        assert_eq!(report.theorem_bound, bound);
        assert!(report.bound_respected_pre_repair);
        assert!(report.colours_used_pre_repair as u64 <= bound);

        let elapsed = started.elapsed();
        assert!(
            elapsed < Duration::from_secs(60),
            "run {run} took {elapsed:?}"
        );
        slowest = slowest.max(elapsed);
    }
    pass(
        5,
        &format!("20 runs: proper, conflict-free, per-vertex cap and pre-repair bound held; slowest {slowest:.2?}"),
    );
}

#[test]
fn acceptance_6_class_partition_pipeline_postconditions() {
    let mut slowest = Duration::ZERO;
    let mut run = 0u64;
    for (n, d) in [(100u32, 40u32), (122, 60)] {
        for r in [1u32, 2] {
            let started = Instant::now();
            let graph_seed = derive_seed(MASTER_SEED, "acceptance-classes-graph", run);
            let run_seed = derive_seed(MASTER_SEED, "acceptance-classes-run", run);
            run += 1;
            let graph = gen_random_regular(n, d, graph_seed).unwrap();
            let budget = 50 * graph.m() as u64;
            let (colouring, plan, report) =
                construct_asymptotic(&graph, r, run_seed, budget).unwrap();

            assert!(is_proper(&graph, &colouring).is_ok());
            assert_eq!(report.final_conflicts, 0);
            let recheck = verify_distinguishing_capped(&graph, &colouring, r, 10).unwrap();
            assert!(recheck.proper && recheck.conflict_count == 0);

            for e in 0..graph.m() as u32 {
                let class = plan.q[e as usize];
                assert!(
                    plan.class_colours(class).contains(&colouring.get(e)),
                    "edge {e} coloured outside its class {class}"
                );
            }
            assert_eq!(plan.theorem_bound, u64::from(plan.t) * u64::from(plan.s));
            assert!(report.colours_used_pre_repair as u64 <= plan.theorem_bound);

            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(120),
                "Δ={d} r={r} took {elapsed:?}"
            );
            slowest = slowest.max(elapsed);
        }
    }
    pass(
        6,
        &format!("Δ ∈ {{40, 60}} × r ∈ {{1, 2}}: proper, conflict-free, class-respecting, bounded; slowest {slowest:.2?}"),
    );
}

#[test]
fn acceptance_7_certificates_and_inequalities() {
    let started = Instant::now();
    for r in 3..=8 {
        assert!(
            !asymptotic_margin_check(r).holds,
            "margin must fail at r={r}"
        );
    }
    for r in 9..=20 {
        assert!(
            asymptotic_margin_check(r).holds,
            "margin must hold at r={r}"
        );
    }

    let thresholds: Vec<u64> = [7u32, 8, 9]
        .iter()
        .map(|&r| certificate_threshold(r, 300, 10_000).expect("threshold exists within the cap"))
        .collect();
    assert_eq!(thresholds, [59, 13, 6]);
    assert!(
        thresholds.windows(2).all(|w| w[0] >= w[1]),
        "larger r must not need a larger scale"
    );
    for (&r, &t) in [7u32, 8, 9].iter().zip(&thresholds) {
        assert!(palette_count_certificate(r, t, 300).verdict);
        assert!(!palette_count_certificate(r, t - 1, 300).verdict);
    }

    for a in 1..=60u64 {
        for b in 1..=a {
            assert!(
                binomial_bounds_check(a, b).all(),
                "bound chain broke at a={a} b={b}"
            );
        }
    }

    for (num, den) in [(1i64, 1i64), (1, 2), (1, 4), (1, 10)] {
        let epsilon = BigRational::new(BigInt::from(num), BigInt::from(den));
        for r in 1..=10 {
            let check = observation2_check(&epsilon, r);
            assert_eq!(check.slack, CertOutcome::Holds, "ε={num}/{den} r={r}");
            assert_eq!(check.decay, CertOutcome::Holds, "ε={num}/{den} r={r}");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    pass(
        7,
        &format!("margins flip at r=9; thresholds (59, 13, 6) monotone; 1830 binomial chains and the 40-cell inequality grid hold, {elapsed:.2?}"),
    );
}

#[test]
fn acceptance_8_structural_families_check_out() {
    let started = Instant::now();
    for t in 2..=4u32 {
        for k in 1..=4u32 {
            let graph = gen_de_bruijn(DeBruijnSpec::new(t, k)).unwrap();
            assert_eq!(graph.n(), t.pow(k), "order of the (t={t}, k={k}) graph");
            assert!(graph.max_degree() <= 2 * t, "degree bound at t={t} k={k}");
            assert_eq!(
                graph.diameter(),
                Some(k),
                "breadth-first diameter at t={t} k={k}"
            );
        }
    }
    for n_scale in [1u32, 2] {
        let instance = gen_lower_bound_instance(3, n_scale).unwrap();
        let expected = 2 * (2 * n_scale) * (2 * n_scale); // 2·(2N)²·1, the r=3 count
        assert_eq!(instance.special_vertices.len() as u32, expected);
        for (i, &u) in instance.special_vertices.iter().enumerate() {
            for &v in &instance.special_vertices[i + 1..] {
                let dist = instance
                    .full
                    .distance(u, v)
                    .expect("instances are connected");
                assert!(dist <= 3, "special pair ({u}, {v}) at distance {dist}");
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(
        8,
        &format!("word-overlap orders, degrees and diameters match; special counts 8 and 32 all within distance 3, {elapsed:.2?}"),
    );
}

#[test]
fn acceptance_9_bench_suites_reproduce_byte_identically() {
    let mut total_bytes = 0usize;
    for suite in [
        Suite::RegularSweep,
        Suite::ConjectureScan,
        Suite::CensusSweep,
        Suite::CertificateSweep,
    ] {
        let first = bench::run_suite(suite, MASTER_SEED, None);
        let second = bench::run_suite(suite, MASTER_SEED, None);
        assert!(!first.is_empty());
        assert_eq!(first, second, "{suite:?} must reproduce byte-identically");
        total_bytes += first.len();
    }
    pass(
        9,
        &format!("four suites × two consecutive runs: byte-identical reports ({total_bytes} bytes each pass)"),
    );
}
