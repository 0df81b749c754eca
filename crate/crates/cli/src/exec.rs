//! Command dispatch: file plumbing, seed resolution, exit-code mapping.

use std::path::{Path, PathBuf};
use std::time::Duration;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::BigRational;
use serde_json::json;

use chromadist_core::colouring::{verify_distinguishing_capped, ColouringError};
use chromadist_core::construct::{
    construct_asymptotic, construct_dense, event_census, ConstructError, DensePipelineParams,
};
use chromadist_core::extremal::{
    asymptotic_margin_check, certificate_threshold, observation2_check, palette_count_certificate,
};
use chromadist_core::graph::{
    gen_complete, gen_cycle, gen_de_bruijn, gen_lower_bound_instance, gen_path, gen_random_regular,
    gen_star, DeBruijnSpec, Graph, GraphError,
};
use chromadist_core::io::{self, IoError};
use chromadist_core::solver::{
    chi_exact, conjecture_scan, BoundForm, EdgeOrder, ScanStatus, SolverConfig, SolverError,
    SolverStatus,
};
use chromadist_core::vizing::{vizing_colour, ColourBlock};

use crate::args::{
    CensusArgs, CertificateArgs, Cli, ColourArgs, Command, ConstructArgs, ConstructMethod, Family,
    Format, GenArgs, OrderArg, ScanArgs, SolveArgs, VerifyArgs,
};
use crate::bench;
use crate::envelope::{csv_preamble, render_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFLICTS: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// A failed command: message for stderr plus the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn guard(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_GUARD,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Failure {
        Failure::guard(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Failure {
        Failure::guard(e.to_string())
    }
}

impl From<ColouringError> for Failure {
    fn from(e: ColouringError) -> Failure {
        match e {
            ColouringError::IsolatedEdge { .. } => Failure::guard(e.to_string()),
            ColouringError::WrongEdgeCount { .. } => Failure::usage(e.to_string()),
        }
    }
}

struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Output {
        Output {
            text,
            code: EXIT_OK,
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Colour(a) => colour(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Construct(a) => construct(a),
        Command::Certificate(a) => certificate(a),
        Command::Scan(a) => scan(a),
        Command::Census(a) => census(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(output) => {
            print!("{}", output.text);
            output.code
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// Seed precedence: --seed flag, then CHROMADIST_SEED, then OS entropy.
fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("CHROMADIST_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Failure::usage(format!(
                "CHROMADIST_SEED must be an unsigned integer, got {text:?}"
            ))
        }),
        Err(_) => Ok(rand::random()),
    }
}

/// Exact fraction in (0, 1]: "1", "1/2", "3/4".
fn parse_unit_ratio(text: &str) -> Result<Ratio<u32>, Failure> {
    let component = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Failure::usage(format!("bad fraction component {s:?}")))
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (component(n)?, component(d)?),
        None => (component(text)?, 1),
    };
    if num == 0 || den == 0 || num > den {
        return Err(Failure::usage(format!(
            "fraction must lie in (0, 1], got {text}"
        )));
    }
    Ok(Ratio::new(num, den))
}

/// Time budget in seconds: positive and finite.
fn parse_time_budget(seconds: f64) -> Result<Duration, Failure> {
    if seconds.is_finite() && seconds > 0.0 {
        Ok(Duration::from_secs_f64(seconds))
    } else {
        Err(Failure::usage(format!(
            "--time must be a positive number of seconds, got {seconds}"
        )))
    }
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn default_colouring_path(input: &Path) -> PathBuf {
    input.with_extension("col")
}

fn gen(a: GenArgs) -> Result<Output, Failure> {
    let need = |value: Option<u32>, flag: &str| {
        value.ok_or_else(|| Failure::usage(format!("--{flag} is required for this family")))
    };
    let mut seed = None;
    let mut extras = serde_json::Map::new();

    let write_single = |graph: &Graph, out: &Path| -> Result<serde_json::Value, Failure> {
        io::write_graph(out, graph)?;
        Ok(json!({
            "n": graph.n(),
            "m": graph.m(),
            "maxDegree": graph.max_degree(),
            "minDegree": graph.min_degree(),
            "path": path_str(out),
        }))
    };

    let report = match a.family {
        Family::Path => write_single(&gen_path(need(a.n, "n")?)?, &a.out)?,
        Family::Cycle => write_single(&gen_cycle(need(a.n, "n")?)?, &a.out)?,
        Family::Complete => write_single(&gen_complete(need(a.n, "n")?)?, &a.out)?,
        Family::Star => write_single(&gen_star(need(a.n, "n")?)?, &a.out)?,
        Family::Regular => {
            let s = resolve_seed(a.seed)?;
            seed = Some(s);
            let graph = gen_random_regular(need(a.n, "n")?, need(a.d, "d")?, s)?;
            write_single(&graph, &a.out)?
        }
        Family::DeBruijn => {
            let spec = DeBruijnSpec::new(need(a.t, "t")?, need(a.k, "k")?);
            write_single(&gen_de_bruijn(spec)?, &a.out)?
        }
        Family::LowerBound => {
            let r = need(a.r, "r")?;
            if r < 3 {
                return Err(Failure::usage(
                    "the lower-bound family needs --r at least 3",
                ));
            }
            let instance = gen_lower_bound_instance(r, a.n_scale)?;
            extras.insert(
                "specialVertices".into(),
                json!(instance.special_vertices.len()),
            );
            extras.insert("backboneOrder".into(), json!(instance.core.n()));
            write_single(&instance.full, &a.out)?
        }
        Family::Corpus => {
            let graphs = crate::corpus::small_connected_corpus(a.max_n);
            io::write_graph_stream(&a.out, &graphs)?;
            json!({ "graphs": graphs.len(), "path": path_str(&a.out) })
        }
    };
    let report = match report {
        serde_json::Value::Object(mut map) => {
            map.append(&mut extras);
            serde_json::Value::Object(map)
        }
        other => other,
    };

    let config = json!({
        "family": format!("{:?}", a.family).to_lowercase(),
        "n": a.n, "d": a.d, "t": a.t, "k": a.k, "r": a.r,
        "nScale": a.n_scale, "maxN": a.max_n,
        "out": path_str(&a.out),
    });
    Ok(Output::ok(render_json("gen", config, seed, report)))
}

fn colour(a: ColourArgs) -> Result<Output, Failure> {
    let graph = io::read_graph(&a.input)?;
    let block = ColourBlock::contiguous(1, graph.max_degree() as usize + 1);
    let colouring = vizing_colour(&graph, &block).expect("a block of width Δ+1 always suffices");
    let out = a.out.unwrap_or_else(|| default_colouring_path(&a.input));
    io::write_colouring(&out, &colouring)?;

    let config = json!({
        "method": "vizing",
        "input": path_str(&a.input),
        "out": path_str(&out),
    });
    let report = json!({
        "coloursUsed": colouring.colour_count(),
        "maxDegree": graph.max_degree(),
        "guarantee": graph.max_degree() + 1,
        "colouringFile": path_str(&out),
    });
    Ok(Output::ok(render_json("colour", config, None, report)))
}

fn solve(a: SolveArgs) -> Result<Output, Failure> {
    let graph = io::read_graph(&a.input)?;
    let config = SolverConfig {
        k_max: a.kmax,
        time_limit: parse_time_budget(a.time)?,
        symmetry_break: true,
        edge_order: match a.order {
            OrderArg::Degeneracy => EdgeOrder::Degeneracy,
            OrderArg::Input => EdgeOrder::Input,
            OrderArg::MaxConflict => EdgeOrder::MaxConflict,
        },
    };
    let result = chi_exact(&graph, a.r, &config)?;

    let witness_file = match (&a.witness, &result.witness) {
        (Some(path), Some(witness)) => {
            io::write_colouring(path, witness)?;
            Some(path_str(path))
        }
        _ => None,
    };
    let status = match result.status {
        SolverStatus::Exact => "exact",
        SolverStatus::LowerBoundOnly => "lowerBoundOnly",
        SolverStatus::Timeout => "timeout",
    };
    let cli_config = json!({
        "r": a.r, "kmax": a.kmax, "time": a.time,
        "order": format!("{:?}", a.order).to_lowercase(),
        "input": path_str(&a.input),
    });
    let report = json!({
        "status": status,
        "value": result.value,
        "witnessFile": witness_file,
        "nodes": result.nodes_explored,
    });
    let code = match result.status {
        SolverStatus::Exact => EXIT_OK,
        // The budget or the clock ran out before the value was pinned down.
        SolverStatus::LowerBoundOnly | SolverStatus::Timeout => EXIT_BUDGET,
    };
    Ok(Output {
        text: render_json("solve", cli_config, None, report),
        code,
    })
}

fn verify(a: VerifyArgs) -> Result<Output, Failure> {
    let graph = io::read_graph(&a.graph)?;
    let colouring = io::read_colouring(&a.colouring, graph.m())?;
    let report = verify_distinguishing_capped(&graph, &colouring, a.r, a.cap)?;

    let clean = report.proper && report.conflict_count == 0;
    let config = json!({
        "r": a.r, "cap": a.cap,
        "graph": path_str(&a.graph),
        "colouring": path_str(&a.colouring),
    });
    Ok(Output {
        text: render_json("verify", config, None, report),
        code: if clean { EXIT_OK } else { EXIT_CONFLICTS },
    })
}

fn construct(a: ConstructArgs) -> Result<Output, Failure> {
    let graph = io::read_graph(&a.input)?;
    let seed = resolve_seed(a.seed)?;
    let budget = a.max_resamples.unwrap_or(50 * graph.m() as u64);
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| default_colouring_path(&a.input));

    let (method, report) = match a.method {
        ConstructMethod::Dense => {
            let epsilon = parse_unit_ratio(&a.epsilon)?;
            let (colouring, run) = construct_dense(&graph, a.r, epsilon, seed, budget)?;
            io::write_colouring(&out, &colouring)?;
            let params =
                DensePipelineParams::derive(a.r, epsilon, graph.max_degree(), budget, seed);
            (
                "dense",
                json!({
                    "params": params,
                    "construction": run,
                    "colouringFile": path_str(&out),
                }),
            )
        }
        ConstructMethod::Asymptotic => {
            let (colouring, plan, run) = construct_asymptotic(&graph, a.r, seed, budget)?;
            io::write_colouring(&out, &colouring)?;
            // The per-edge class draw can be as long as the edge list;
            // report class sizes instead and keep the plan slim.
            let class_sizes: Vec<usize> = (0..plan.t)
                .map(|i| plan.q.iter().filter(|&&q| q == i).count())
                .collect();
            let mut slim = plan.clone();
            slim.q = Vec::new();
            (
                "asymptotic",
                json!({
                    "plan": slim,
                    "classSizes": class_sizes,
                    "construction": run,
                    "colouringFile": path_str(&out),
                }),
            )
        }
    };

    let config = json!({
        "method": method,
        "r": a.r,
        "epsilon": a.epsilon,
        "maxResamples": budget,
        "input": path_str(&a.input),
        "out": path_str(&out),
    });
    Ok(Output::ok(render_json(
        "construct",
        config,
        Some(seed),
        report,
    )))
}

fn certificate(a: CertificateArgs) -> Result<Output, Failure> {
    let config = json!({
        "r": a.r, "nScale": a.n_scale, "c": a.c,
        "sweepN": a.sweep_n,
        "threshold": a.threshold, "thresholdCap": a.threshold_cap,
        "margin": a.margin,
        "technicalEpsilon": a.technical_epsilon,
    });

    if a.margin {
        if a.r < 3 {
            return Err(Failure::usage(
                "the growth margin is defined for --r at least 3",
            ));
        }
        let check = asymptotic_margin_check(a.r);
        return Ok(Output::ok(render_json("certificate", config, None, check)));
    }

    if let Some(text) = &a.technical_epsilon {
        if a.r < 1 {
            return Err(Failure::usage("--r must be at least 1"));
        }
        let ratio = parse_unit_ratio(text)?;
        let epsilon = BigRational::new(BigInt::from(*ratio.numer()), BigInt::from(*ratio.denom()));
        let check = observation2_check(&epsilon, a.r);
        return Ok(Output::ok(render_json("certificate", config, None, check)));
    }

    if a.r < 3 {
        return Err(Failure::usage(
            "the counting certificate is defined for --r at least 3",
        ));
    }

    if a.threshold {
        let found = certificate_threshold(a.r, a.c, a.threshold_cap);
        let report = json!({
            "r": a.r, "c": a.c,
            "threshold": found,
            "searchCap": a.threshold_cap,
        });
        return Ok(Output::ok(render_json("certificate", config, None, report)));
    }

    if let Some(max_scale) = a.sweep_n {
        if max_scale == 0 {
            return Err(Failure::usage("--sweep-n must be at least 1"));
        }
        let mut text = csv_preamble("certificate", &config, None);
        text.push_str("r,c,nScale,lhs,rhs,verdict\n");
        for n_scale in 1..=max_scale {
            let cert = palette_count_certificate(a.r, n_scale, a.c);
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cert.r, cert.c, cert.n_scale, cert.lhs, cert.rhs, cert.verdict
            ));
        }
        return Ok(Output::ok(text));
    }

    let cert = palette_count_certificate(a.r, a.n_scale, a.c);
    Ok(Output::ok(render_json("certificate", config, None, cert)))
}

fn scan(a: ScanArgs) -> Result<Output, Failure> {
    let bound_form = if a.bound == "delta-plus-2" {
        BoundForm::DeltaPlusTwo
    } else {
        let c: u32 = a.bound.parse().map_err(|_| {
            Failure::usage(format!(
                "--bound must be delta-plus-2 or an integer C (meaning Δ+C), got {:?}",
                a.bound
            ))
        })?;
        BoundForm::Custom(c)
    };
    let graphs = io::read_graph_stream(&a.input)?;
    if graphs.is_empty() {
        return Err(Failure::usage("the graph stream is empty"));
    }
    let solver_config = SolverConfig {
        time_limit: parse_time_budget(a.time)?,
        ..SolverConfig::default()
    };
    let report = conjecture_scan(&graphs, a.r, bound_form, &solver_config);

    let config = json!({
        "r": a.r, "bound": a.bound, "time": a.time,
        "format": format!("{:?}", a.format).to_lowercase(),
        "input": path_str(&a.input),
    });
    let code = if report.violations > 0 {
        EXIT_CONFLICTS
    } else {
        EXIT_OK
    };
    let text = match a.format {
        Format::Json => render_json("scan", config, None, report),
        Format::Csv => {
            let mut text = csv_preamble("scan", &config, None);
            text.push_str(
                "index,n,m,maxDegree,status,value,bound,exceeds,whitelisted,violation,nodes\n",
            );
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
                    rec.nodes_explored
                ));
            }
            text.push_str(&format!(
                "# solved={} excluded={} timedOut={} violations={}\n",
                report.solved, report.excluded, report.timed_out, report.violations
            ));
            text
        }
    };
    Ok(Output { text, code })
}

fn census(a: CensusArgs) -> Result<Output, Failure> {
    if a.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let graph = io::read_graph(&a.input)?;
    let seed = resolve_seed(a.seed)?;
    let epsilon = parse_unit_ratio(&a.epsilon)?;
    // The census is a single pass per trial; the resampling budget plays no
    // part in it, so the derived parameters carry zero.
    let params = DensePipelineParams::derive(a.r, epsilon, graph.max_degree(), 0, seed);
    let report = event_census(&graph, &params, a.trials, seed)?;

    let config = json!({
        "r": a.r, "epsilon": a.epsilon, "trials": a.trials,
        "format": format!("{:?}", a.format).to_lowercase(),
        "input": path_str(&a.input),
    });
    let text = match a.format {
        Format::Json => render_json("census", config, Some(seed), report),
        Format::Csv => {
            let mut text = csv_preamble("census", &config, Some(seed));
            text.push_str("kind,trials,violations,frequency,referenceRate\n");
            for row in &report.rows {
                let kind =
                    serde_json::to_value(row.kind).expect("event kinds serialise to strings");
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    kind.as_str().expect("event kinds serialise to strings"),
                    report.trials,
                    row.violations,
                    row.frequency,
                    row.reference_rate
                ));
            }
            text
        }
    };
    Ok(Output::ok(text))
}

fn run_bench(a: crate::args::BenchArgs) -> Result<Output, Failure> {
    let seed = resolve_seed(a.seed)?;
    let corpus_graphs = match &a.corpus {
        Some(path) => Some(io::read_graph_stream(path)?),
        None => None,
    };
    let text = bench::run_suite(a.suite, seed, corpus_graphs.as_deref());
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path_str(path))))?;
            Ok(Output::ok(format!("wrote {}\n", path_str(path))))
        }
        None => Ok(Output::ok(text)),
    }
}
