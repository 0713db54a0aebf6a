// SPDX-License-Identifier: Apache-2.0

//! `dense-stream`: generate graphs, stream them through a reservoir, detect
//! and reconstruct dense subgraphs, and run experiments.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dense_stream::degree_model::{zipf_sequence, DegreeSequence};
use dense_stream::detector::{
    approximation_metrics, detect_dynamic, detect_static, estimate_dynamic, reconstruct_edges, reservoir_capacity,
    DetectionParams, DetectionVerdict, EstimationConfig, DEFAULT_EPSILON,
};
use dense_stream::dynamics::{run_schedule, DynamicsConfig};
use dense_stream::graph_gen::{
    concentrated_model_with, configuration_model, erdos_renyi, planted_set, GroundTruth, MultiGraph,
};
use dense_stream::harness::{run_experiment, write_report, ExperimentConfig};
use dense_stream::sketch::{connected_components, reservoir_degree_stats, two_core};
use dense_stream::stream::{
    read_edge_file, stream_from_graph, window_reservoirs, write_edge_stream, Reservoir, StreamOrder, TimestampMode,
    WindowConfig,
};
use dense_stream::{Edge, Error, NodeId};
use serde_json::json;

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(
    name = "dense-stream",
    version,
    about = "Streaming detection of large very dense subgraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a degree sequence, a graph and (for planted graphs) the ground truth.
    Generate(GenerateArgs),
    /// Turn a graph file into a shuffled, timestamped edge file.
    Stream(StreamArgs),
    /// Reservoir-sample an edge file and print the verdict as JSON.
    Detect(DetectArgs),
    /// As `detect`, and also print the reconstructed node set.
    Reconstruct(ReconstructArgs),
    /// Run a uniform / concentrated / uniform schedule and detect over windows.
    Dynamic(DynamicArgs),
    /// Degree statistics of a reservoir sampled from an edge file.
    Stats(StatsArgs),
    /// Run an experiment described by a config file.
    Experiment(ExperimentArgs),
    /// Cross-check components, 2-core and matchings against brute force.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Uniform,
    Concentrated,
    Er,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    model: Model,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    /// Edge probability for `--model er`.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Redraw until the graph has no self-loops or repeated edges.
    #[arg(long)]
    simple: bool,
    #[arg(long, env = "DENSE_STREAM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct StreamArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "DENSE_STREAM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DetectionArgs {
    /// Edge file.
    #[arg(long)]
    input: PathBuf,
    /// Node count; defaults to the file's `# n=` header.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    /// Sampling multiplier; defaults to 2(1+ε)/(γδ).
    #[arg(long)]
    alpha: Option<f64>,
    /// Zipf constant; defaults to the one solved for n.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    threshold_coeff: f64,
    #[arg(long, env = "DENSE_STREAM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[command(flatten)]
    common: DetectionArgs,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[command(flatten)]
    common: DetectionArgs,
    /// Ground-truth file; adds precision and recall to the output.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DynamicArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    threshold_coeff: f64,
    #[arg(long)]
    tau: u64,
    #[arg(long)]
    lambda: u64,
    #[arg(long)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    uniform_steps: u64,
    #[arg(long, default_value_t = 0)]
    concentrated_steps: u64,
    #[arg(long, default_value_t = 0)]
    tail_steps: u64,
    /// Independent accepting windows to union for the estimate.
    #[arg(long, default_value_t = 2)]
    windows: usize,
    /// Also write the annotated edge stream here.
    #[arg(long)]
    stream_out: Option<PathBuf>,
    #[arg(long, env = "DENSE_STREAM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Reservoir capacity.
    #[arg(long)]
    k: usize,
    #[arg(long, env = "DENSE_STREAM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    config: PathBuf,
    /// Output directory; overrides the config's `output`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, default_value_t = 1000)]
    graphs: usize,
    #[arg(long, env = "DENSE_STREAM_SEED", default_value_t = 0)]
    seed: u64,
}

fn data_code(e: &Error) -> u8 {
    match e {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

fn print_json(v: &serde_json::Value) {
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(v).expect("json value")
    );
}

fn generate(a: &GenerateArgs) -> Result<(), Error> {
    fs::create_dir_all(&a.out_dir)?;
    let (graph, truth, seq): (MultiGraph, Option<GroundTruth>, Option<DegreeSequence>) = match a.model {
        Model::Er => (erdos_renyi(a.n as usize, a.p, a.seed)?, None, None),
        Model::Uniform => {
            let seq = zipf_sequence(a.n)?;
            (configuration_model(&seq, a.simple, a.seed)?, None, Some(seq))
        }
        Model::Concentrated => {
            let seq = zipf_sequence(a.n)?;
            let (g, t) = concentrated_model_with(&seq, a.gamma, a.delta, a.simple, a.seed)?;
            (g, Some(t), Some(seq))
        }
    };
    if let Some(seq) = &seq {
        fs::write(a.out_dir.join("degrees.txt"), seq.to_text())?;
    }
    fs::write(a.out_dir.join("graph.txt"), graph.to_text())?;
    if let Some(t) = &truth {
        fs::write(a.out_dir.join("truth.txt"), t.to_text())?;
    }
    print_json(&json!({
        "n": graph.n(),
        "edges": graph.edge_count(),
        "simple": graph.is_simple(),
        "planted_size": truth.as_ref().map(GroundTruth::len),
    }));
    Ok(())
}

fn stream(a: &StreamArgs) -> Result<(), Error> {
    let g = MultiGraph::from_text(BufReader::new(File::open(&a.graph)?))?;
    let edges = stream_from_graph(&g, StreamOrder::Shuffled(a.seed), TimestampMode::UnitSpaced)?;
    let header = [format!("n={}", g.n())];
    let mut w = BufWriter::new(File::create(&a.out)?);
    write_edge_stream(&mut w, header.iter().map(String::as_str), &edges)?;
    w.flush()?;
    Ok(())
}

struct Sampled {
    n: u64,
    params: DetectionParams,
    reservoir: Reservoir,
    verdict: DetectionVerdict,
    skipped_self_loops: usize,
}

fn sample(a: &DetectionArgs) -> Result<Sampled, Error> {
    let parsed = read_edge_file(&a.input)?;
    let n =
        a.n.or(parsed.header_n)
            .ok_or_else(|| Error::InvalidArgument("node count unknown: pass --n or add a '# n=' header".into()))?;
    let c = match a.c {
        Some(c) => c,
        None => zipf_sequence(n)?.c(),
    };
    let params = DetectionParams {
        gamma: a.gamma,
        delta: a.delta,
        epsilon: a.epsilon,
        alpha: a.alpha.unwrap_or(2.0 * (1.0 + a.epsilon) / (a.gamma * a.delta)),
        c,
        threshold_coeff: a.threshold_coeff,
    };
    let k = reservoir_capacity(n, &params)?;
    let mut reservoir = Reservoir::new(k, a.seed);
    reservoir.extend(parsed.edges);
    let verdict = detect_static(&reservoir, n, &params)?;
    Ok(Sampled {
        n,
        params,
        reservoir,
        verdict,
        skipped_self_loops: parsed.skipped_self_loops,
    })
}

fn verdict_json(s: &Sampled) -> serde_json::Value {
    json!({
        "accept": s.verdict.accept,
        "largest_component": s.verdict.largest_size,
        "threshold": s.verdict.threshold,
        "n": s.n,
        "k": s.reservoir.capacity(),
        "alpha": s.params.alpha,
        "c": s.params.c,
        "edges_seen": s.reservoir.seen(),
        "skipped_self_loops": s.skipped_self_loops,
    })
}

fn verdict_code(accept: bool) -> ExitCode {
    ExitCode::from(if accept { 0 } else { 1 })
}

fn detect(a: &DetectArgs) -> Result<ExitCode, Error> {
    let s = sample(&a.common)?;
    print_json(&verdict_json(&s));
    Ok(verdict_code(s.verdict.accept))
}

fn reconstruct(a: &ReconstructArgs) -> Result<ExitCode, Error> {
    let s = sample(&a.common)?;
    let nodes = reconstruct_edges(&s.reservoir.edges(), s.verdict.threshold);
    let mut out = verdict_json(&s);
    out["nodes"] = json!(nodes);
    if let Some(path) = &a.truth {
        let truth = GroundTruth::from_text(BufReader::new(File::open(path)?))?;
        let score = approximation_metrics(nodes.as_deref().unwrap_or(&[]), &truth);
        out["score"] = serde_json::to_value(score)?;
    }
    print_json(&out);
    Ok(verdict_code(s.verdict.accept))
}

fn dynamic(a: &DynamicArgs) -> Result<(), Error> {
    let seq = zipf_sequence(a.n)?;
    let focus = planted_set(&seq, a.delta)?;
    let truth = GroundTruth::new(focus.clone(), a.gamma, a.delta)?;
    let params = DetectionParams::derived(a.gamma, a.delta, seq.c())?.with_threshold_coeff(a.threshold_coeff);
    let params = match a.alpha {
        Some(alpha) => params.with_alpha(alpha),
        None => params,
    };
    let k = reservoir_capacity(a.n, &params)?;
    let wcfg = WindowConfig::new(a.tau, a.lambda)?;
    let est = EstimationConfig::with_windows(a.windows)?;
    let g = configuration_model(&seq, false, a.seed)?;
    let cfg = DynamicsConfig::step(a.q, focus, a.gamma, a.uniform_steps, a.concentrated_steps, a.tail_steps);
    let run = run_schedule(&g, &cfg, a.seed)?;
    if let Some(path) = &a.stream_out {
        let mut w = BufWriter::new(File::create(path)?);
        run.write_annotated(&mut w, g.n())?;
        w.flush()?;
    }
    let windows = window_reservoirs(run.stream.iter().copied(), wcfg, k, a.seed)?;
    let n = a.n;
    let verdict = detect_dynamic(&windows, |_| n, &params)?;
    let estimate = estimate_dynamic(&windows, |_| n, &params, &est, &wcfg)?;
    let score = approximation_metrics(&estimate.nodes, &truth);
    print_json(&json!({
        "k": k,
        "windows": windows.len(),
        "verdict": verdict,
        "phases": run.phases,
        "estimate": {
            "nodes": estimate.nodes.len(),
            "windows_used": estimate.windows_used,
            "insufficient_windows": estimate.insufficient_windows,
        },
        "score": score,
    }));
    Ok(())
}

fn stats(a: &StatsArgs) -> Result<(), Error> {
    let parsed = read_edge_file(&a.input)?;
    let mut r = Reservoir::new(a.k, a.seed);
    r.extend(parsed.edges);
    let s = reservoir_degree_stats(&r.edges());
    let mut v = serde_json::to_value(s)?;
    v["edges_seen"] = json!(r.seen());
    print_json(&v);
    Ok(())
}

fn experiment(a: &ExperimentArgs) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(&a.config)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if a.output.is_some() {
        cfg.output = a.output.clone();
    }
    let report = run_experiment(&cfg)?;
    if let Some(dir) = &cfg.output {
        write_report(&report, dir)?;
    }
    print_json(&json!({
        "scenario": report.scenario,
        "trials": report.rows.len(),
        "failed_trials": report.failed_trials,
        "reservoir_capacity": report.reservoir_capacity,
        "threshold": report.threshold,
        "aggregates": report.aggregates,
    }));
    Ok(if report.failed_trials > 0 {
        ExitCode::from(EXIT_DATA)
    } else {
        ExitCode::SUCCESS
    })
}

/// Small random multigraph with up to `max_edges` edges on `nodes` nodes.
fn random_graph(rng: &mut u64, nodes: u32, max_edges: usize) -> Vec<Edge> {
    // splitmix64, so the self-check needs nothing beyond the library.
    let mut next = || {
        *rng = rng.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *rng;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let m = (next() % (max_edges as u64 + 1)) as usize;
    (0..m)
        .map(|_| Edge::new((next() % nodes as u64) as NodeId, (next() % nodes as u64) as NodeId))
        .collect()
}

fn oracle(a: &OracleArgs) -> Result<ExitCode, Error> {
    use dense_stream::harness::oracle::{oracle_components, oracle_matchings, oracle_two_core};
    use std::collections::BTreeSet;

    let mut state = a.seed;
    let mut component_mismatch = 0usize;
    let mut core_mismatch = 0usize;
    for _ in 0..a.graphs {
        let edges = random_graph(&mut state, 40, 50);
        let fast: BTreeSet<BTreeSet<NodeId>> = connected_components(&edges)
            .components
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        if fast != oracle_components(&edges)? {
            component_mismatch += 1;
        }
        let nodes: Vec<NodeId> = (0..40).collect();
        let core: BTreeSet<NodeId> = two_core(&nodes, &edges).into_iter().collect();
        if core != oracle_two_core(&nodes, &edges)? {
            core_mismatch += 1;
        }
    }
    let matchings = oracle_matchings(6)?.len();
    let ok = component_mismatch == 0 && core_mismatch == 0 && matchings == 15;
    print_json(&json!({
        "graphs": a.graphs,
        "component_mismatches": component_mismatch,
        "two_core_mismatches": core_mismatch,
        "six_stub_matchings": matchings,
        "pass": ok,
    }));
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INTERNAL)
    })
}

fn unit(r: Result<(), Error>) -> Result<ExitCode, Error> {
    r.map(|()| ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let verdict_command = matches!(cli.command, Command::Detect(_) | Command::Reconstruct(_));
    let outcome = match &cli.command {
        Command::Generate(a) => unit(generate(a)),
        Command::Stream(a) => unit(stream(a)),
        Command::Detect(a) => detect(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Dynamic(a) => unit(dynamic(a)),
        Command::Stats(a) => unit(stats(a)),
        Command::Experiment(a) => experiment(a),
        Command::Oracle(a) => oracle(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            // detect and reconstruct reserve 0 and 1 for verdicts.
            ExitCode::from(if verdict_command { 2 } else { data_code(&e) })
        }
    }
}
