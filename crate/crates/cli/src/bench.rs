//! Pinned benchmark grids. Each suite renders one CSV string whose bytes
//! depend only on the tool version, the suite and the master seed, so two
//! runs of the same cell can be compared with a plain diff. Suites that
//! use no randomness omit the seed line instead of echoing a dead value.

use num::rational::Ratio;
use serde_json::json;

use chromadist_core::construct::{construct_dense, event_census, DensePipelineParams};
use chromadist_core::extremal::{certificate_threshold, palette_count_certificate};
use chromadist_core::graph::{gen_random_regular, Graph};
use chromadist_core::seed::derive_seed;
use chromadist_core::solver::{conjecture_scan, BoundForm, ScanStatus, SolverConfig};

use crate::args::Suite;
use crate::corpus::small_connected_corpus;
use crate::envelope::csv_preamble;

pub fn run_suite(suite: Suite, master_seed: u64, corpus: Option<&[Graph]>) -> String {
    match suite {
        Suite::RegularSweep => regular_sweep(master_seed),
        Suite::ConjectureScan => conjecture_suite(corpus),
        Suite::CensusSweep => census_sweep(master_seed),
        Suite::CertificateSweep => certificate_sweep(),
    }
}

/// Dense pipeline over d ∈ {6, 8, 10} × r ∈ {1, 2} × five seed indices on
/// 200-vertex regular graphs, ε = 1.
fn regular_sweep(master_seed: u64) -> String {
    const N: u32 = 200;
    let config = json!({
        "suite": "regular-sweep",
        "d": [6, 8, 10], "n": N, "r": [1, 2], "seedIndices": 5, "epsilon": "1",
    });
    let mut text = csv_preamble("bench", &config, Some(master_seed));
    text.push_str(
        "d,n,r,seedIndex,coloursUsed,coloursPreRepair,theoremBound,\
         resamples,flagged,repairs,finalConflicts\n",
    );
    let mut cell = 0u64;
    for d in [6u32, 8, 10] {
        for r in [1u32, 2] {
            for seed_index in 0..5u64 {
                let graph_seed = derive_seed(master_seed, "regular-sweep-graph", cell);
                let run_seed = derive_seed(master_seed, "regular-sweep-run", cell);
                cell += 1;
                let graph = gen_random_regular(N, d, graph_seed).expect("N·d is even and d < N");
                let budget = 50 * graph.m() as u64;
                let (colouring, report) =
                    construct_dense(&graph, r, Ratio::from_integer(1), run_seed, budget)
                        .expect("regular graphs pass the degree-ratio guard");
                let resamples: u64 = report.resample_counts.values().sum();
                let flagged: u64 = report.flagged_counts.values().sum();
                text.push_str(&format!(
                    "{d},{N},{r},{seed_index},{},{},{},{resamples},{flagged},{},{}\n",
                    colouring.colour_count(),
                    report.colours_used_pre_repair,
                    report.theorem_bound,
                    report.repairs_applied.len(),
                    report.final_conflicts,
                ));
            }
        }
    }
    text
}

/// Exact values against Δ+2 over the built-in corpus of small connected
/// graphs (or a supplied stream). Fully deterministic.
fn conjecture_suite(corpus: Option<&[Graph]>) -> String {
    let built_in;
    let graphs: &[Graph] = match corpus {
        Some(graphs) => graphs,
        None => {
            built_in = small_connected_corpus(6);
            &built_in
        }
    };
    let config = json!({
        "suite": "conjecture-scan",
        "graphs": graphs.len(), "r": 1, "bound": "delta-plus-2",
    });
    let report = conjecture_scan(graphs, 1, BoundForm::DeltaPlusTwo, &SolverConfig::default());

    let mut text = csv_preamble("bench", &config, None);
    text.push_str("index,n,m,maxDegree,status,value,bound,exceeds,whitelisted,violation,nodes\n");
    for rec in &report.records {
        let status = match rec.status {
            ScanStatus::Solved => "solved",
            ScanStatus::Excluded => "excluded",
            ScanStatus::TimedOut => "timedOut",
        };
        let value = rec.value.map_or(String::new(), |v| v.to_string());
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            rec.index,
            rec.n,
            rec.m,
            rec.max_degree,
            status,
            value,
            rec.bound,
            rec.exceeds,
            rec.whitelisted,
            rec.violation,
            rec.nodes_explored,
        ));
    }
    text.push_str(&format!(
        "# solved={} excluded={} timedOut={} violations={}\n",
        report.solved, report.excluded, report.timed_out, report.violations
    ));
    text
}

/// Trigger-event frequencies at 100 trials per cell, ε = 1.
fn census_sweep(master_seed: u64) -> String {
    const TRIALS: u64 = 100;
    let cells: [(u32, u32, u32); 3] = [(8, 100, 1), (8, 100, 2), (20, 400, 1)];
    let config = json!({
        "suite": "census-sweep",
        "cells": cells.iter().map(|&(d, n, r)| json!({"d": d, "n": n, "r": r})).collect::<Vec<_>>(),
        "trials": TRIALS, "epsilon": "1",
    });
    let mut text = csv_preamble("bench", &config, Some(master_seed));
    text.push_str("d,n,r,kind,sites,trials,violations,frequency,referenceRate\n");
    for (index, &(d, n, r)) in cells.iter().enumerate() {
        let graph_seed = derive_seed(master_seed, "census-sweep-graph", index as u64);
        let census_seed = derive_seed(master_seed, "census-sweep-run", index as u64);
        let graph = gen_random_regular(n, d, graph_seed).expect("n·d is even and d < n");
        let params = DensePipelineParams::derive(
            r,
            Ratio::from_integer(1),
            graph.max_degree(),
            0,
            census_seed,
        );
        let report = event_census(&graph, &params, TRIALS, census_seed)
            .expect("regular graphs pass the degree-ratio guard");
        for row in &report.rows {
            let kind = serde_json::to_value(row.kind).expect("event kinds serialise to strings");
            text.push_str(&format!(
                "{d},{n},{r},{},{},{},{},{},{}\n",
                kind.as_str().expect("event kinds serialise to strings"),
                row.sites,
                TRIALS,
                row.violations,
                row.frequency,
                row.reference_rate,
            ));
        }
    }
    text
}

/// Counting-certificate verdicts for r ∈ {7, 8, 9} at C = 300, swept from
/// scale 1 to ten past the first true verdict. Fully deterministic.
fn certificate_sweep() -> String {
    const C: u64 = 300;
    const SEARCH_CAP: u64 = 10_000;
    let config = json!({
        "suite": "certificate-sweep",
        "r": [7, 8, 9], "c": C, "searchCap": SEARCH_CAP,
    });
    let mut text = csv_preamble("bench", &config, None);
    text.push_str("r,c,nScale,lhs,rhs,verdict\n");
    let mut summaries = Vec::new();
    for r in [7u32, 8, 9] {
        let threshold = certificate_threshold(r, C, SEARCH_CAP);
        let last_scale = match threshold {
            Some(t) => t + 10,
            None => 10,
        };
        for n_scale in 1..=last_scale {
            let cert = palette_count_certificate(r, n_scale, C);
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cert.r, cert.c, cert.n_scale, cert.lhs, cert.rhs, cert.verdict
            ));
        }
        summaries.push(match threshold {
            Some(t) => format!("# r={r} threshold={t}\n"),
            None => format!("# r={r} threshold=none within cap\n"),
        });
    }
    for line in summaries {
        text.push_str(&line);
    }
    text
}
