// SPDX-License-Identifier: Apache-2.0

//! Trial runner and self-auditing reports.
//!
//! Trial `i` uses seed `seed + i`. Trials run in parallel and are collected
//! in index order, so the report does not depend on the worker count.
//!
//! The CSV table has one row per trial with the columns of [`TrialRow`] in
//! declaration order; empty cells mean "not applicable to this scenario".
//! The JSON report holds the canonical config text, the derived sizes, every
//! row and one [`Aggregate`] per numeric column.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree_model::{zipf_sequence, DegreeSequence};
use crate::detector::{
    approximation_metrics, detect_dynamic, detect_static, detection_threshold, estimate_dynamic, reconstruct_edges,
    reservoir_capacity, DetectionParams, EstimationConfig,
};
use crate::dynamics::{run_schedule, DynamicsConfig};
use crate::error::{Error, Result};
use crate::graph_gen::{concentrated_model, configuration_model, erdos_renyi, planted_set, GroundTruth};
use crate::harness::config::{ExperimentConfig, Scenario};
use crate::harness::er_core::{solve_er_core, ErCoreSolution};
use crate::harness::stats::{ci95, mean};
use crate::sketch::{connected_components, reservoir_degree_stats, two_core};
use crate::stream::{stream_from_graph, window_reservoirs, Reservoir, StreamOrder, TimestampMode, WindowConfig};
use crate::types::NodeId;

/// One trial. Column order of the CSV table; do not reorder.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub accept: Option<bool>,
    pub largest_component: Option<usize>,
    pub threshold: Option<usize>,
    pub reservoir_len: Option<usize>,
    pub n_r: Option<u64>,
    pub x1_ratio: Option<f64>,
    pub q_stat: Option<f64>,
    pub i_star: Option<u32>,
    pub estimate_size: Option<usize>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub spurious_fraction: Option<f64>,
    pub component_fraction: Option<f64>,
    pub core_fraction: Option<f64>,
    pub accept_window: Option<usize>,
    pub early_accept: Option<bool>,
    pub windows_used: Option<usize>,
    pub single_window_recall: Option<f64>,
    pub elapsed_ms: Option<u64>,
}

impl TrialRow {
    fn metrics(&self) -> [(&'static str, Option<f64>); 14] {
        let flag = |b: Option<bool>| b.map(|b| if b { 1.0 } else { 0.0 });
        [
            ("accept", flag(self.accept)),
            ("largest_component", self.largest_component.map(|v| v as f64)),
            ("reservoir_len", self.reservoir_len.map(|v| v as f64)),
            ("x1_ratio", self.x1_ratio),
            ("q_stat", self.q_stat),
            ("i_star", self.i_star.map(f64::from)),
            ("estimate_size", self.estimate_size.map(|v| v as f64)),
            ("recall", self.recall),
            ("precision", self.precision),
            ("spurious_fraction", self.spurious_fraction),
            ("component_fraction", self.component_fraction),
            ("core_fraction", self.core_fraction),
            ("early_accept", flag(self.early_accept)),
            ("single_window_recall", self.single_window_recall),
        ]
    }
}

/// Mean and 95% interval of one metric over the trials that report it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub metric: String,
    pub count: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

fn aggregate(rows: &[TrialRow]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    let names = TrialRow::default().metrics().map(|(name, _)| name);
    for (j, name) in names.into_iter().enumerate() {
        let xs: Vec<f64> = rows.iter().filter_map(|r| r.metrics()[j].1).collect();
        let (Some(m), Some((lo, hi))) = (mean(&xs), ci95(&xs)) else {
            continue;
        };
        out.push(Aggregate {
            metric: name.to_string(),
            count: xs.len(),
            mean: m,
            ci_low: lo,
            ci_high: hi,
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    /// Canonical config text, for provenance.
    pub config: String,
    pub n: u64,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub reservoir_capacity: Option<usize>,
    pub threshold: Option<usize>,
    pub planted_size: Option<usize>,
    pub er_core: Option<ErCoreSolution>,
    pub failed_trials: usize,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<Aggregate>,
}

impl Report {
    /// Whether the stored aggregates equal a recomputation from the rows.
    pub fn verify(&self) -> bool {
        self.aggregates == aggregate(&self.rows)
            && self.failed_trials == self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn aggregate(&self, metric: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.metric == metric)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            // Header only, so the column set is visible even without trials.
            w.write_record(CSV_COLUMNS)?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

pub const CSV_COLUMNS: [&str; 22] = [
    "trial",
    "seed",
    "error",
    "accept",
    "largest_component",
    "threshold",
    "reservoir_len",
    "n_r",
    "x1_ratio",
    "q_stat",
    "i_star",
    "estimate_size",
    "recall",
    "precision",
    "spurious_fraction",
    "component_fraction",
    "core_fraction",
    "accept_window",
    "early_accept",
    "windows_used",
    "single_window_recall",
    "elapsed_ms",
];

/// Writes `report.json` and `trials.csv` into `dir`, creating it if needed.
pub fn write_report(report: &Report, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report.to_json()?)?;
    fs::write(dir.join("trials.csv"), report.to_csv()?)?;
    Ok(())
}

/// Everything shared by the trials of one experiment, computed once.
struct Setup {
    seq: Option<DegreeSequence>,
    params: Option<DetectionParams>,
    k: Option<usize>,
    threshold: Option<usize>,
    focus: Option<Vec<NodeId>>,
    er_core: Option<ErCoreSolution>,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    cfg.validate()?;
    if cfg.scenario == Scenario::ErCore {
        let er_core = (cfg.c1 > 1.0).then(|| solve_er_core(cfg.c1)).transpose()?;
        return Ok(Setup {
            seq: None,
            params: None,
            k: None,
            threshold: None,
            focus: None,
            er_core,
        });
    }
    let seq = zipf_sequence(cfg.n)?;
    let c = cfg.c.unwrap_or(seq.c());
    let alpha = cfg.alpha.unwrap_or(2.0 * (1.0 + cfg.epsilon) / (cfg.gamma * cfg.delta));
    let params = DetectionParams {
        gamma: cfg.gamma,
        delta: cfg.delta,
        epsilon: cfg.epsilon,
        alpha,
        c,
        threshold_coeff: cfg.threshold_coeff,
    };
    params.validate()?;
    let k = reservoir_capacity(cfg.n, &params)?;
    let threshold = detection_threshold(cfg.n, cfg.threshold_coeff)?;
    let focus = match cfg.scenario {
        Scenario::Concentrated | Scenario::StepDynamics => Some(planted_set(&seq, cfg.delta)?),
        _ => None,
    };
    if cfg.scenario == Scenario::StepDynamics {
        DynamicsConfig::step(cfg.q, focus.clone().unwrap_or_default(), cfg.gamma, 0, 1, 0).validate()?;
    }
    Ok(Setup {
        seq: Some(seq),
        params: Some(params),
        k: Some(k),
        threshold: Some(threshold),
        focus,
        er_core: None,
    })
}

fn static_trial(cfg: &ExperimentConfig, s: &Setup, seed: u64, row: &mut TrialRow) -> Result<()> {
    let seq = s.seq.as_ref().expect("sequence");
    let params = s.params.as_ref().expect("params");
    let (g, truth) = match cfg.scenario {
        Scenario::Concentrated => {
            let (g, t) = concentrated_model(seq, cfg.gamma, cfg.delta, seed)?;
            (g, Some(t))
        }
        _ => (configuration_model(seq, false, seed)?, None),
    };
    let stream = stream_from_graph(&g, StreamOrder::Shuffled(seed), TimestampMode::UnitSpaced)?;
    let mut r = Reservoir::new(s.k.expect("k"), seed);
    r.extend(stream);
    let verdict = detect_static(&r, cfg.n, params)?;
    let edges = r.edges();
    let stats = reservoir_degree_stats(&edges);
    row.accept = Some(verdict.accept);
    row.largest_component = Some(verdict.largest_size);
    row.threshold = Some(verdict.threshold);
    row.reservoir_len = Some(r.len());
    row.n_r = Some(stats.n_r);
    row.x1_ratio = Some(stats.x1_ratio);
    row.q_stat = Some(stats.q_stat);
    row.i_star = Some(stats.i_star);
    if let Some(truth) = truth {
        let estimate = reconstruct_edges(&edges, verdict.threshold).unwrap_or_default();
        score(&estimate, &truth, row);
    }
    Ok(())
}

fn score(estimate: &[NodeId], truth: &GroundTruth, row: &mut TrialRow) {
    let m = approximation_metrics(estimate, truth);
    row.estimate_size = Some(estimate.len());
    row.recall = Some(m.recall);
    row.precision = m.precision;
    row.spurious_fraction = Some(m.spurious as f64 / truth.len() as f64);
}

fn er_trial(cfg: &ExperimentConfig, seed: u64, row: &mut TrialRow) -> Result<()> {
    let n = cfg.n as usize;
    let g = erdos_renyi(n, (cfg.c1 / cfg.n as f64).min(1.0), seed)?;
    let summary = connected_components(g.edges());
    let giant = summary.largest();
    row.largest_component = Some(giant.len());
    row.component_fraction = Some(giant.len() as f64 / n as f64);
    row.core_fraction = Some(two_core(giant, g.edges()).len() as f64 / n as f64);
    Ok(())
}

fn dynamic_trial(cfg: &ExperimentConfig, s: &Setup, seed: u64, row: &mut TrialRow) -> Result<()> {
    let seq = s.seq.as_ref().expect("sequence");
    let params = s.params.as_ref().expect("params");
    let focus = s.focus.clone().expect("focus");
    let truth = GroundTruth::new(focus.clone(), cfg.gamma, cfg.delta)?;
    let g = configuration_model(seq, false, seed)?;
    let dcfg = DynamicsConfig::step(
        cfg.q,
        focus,
        cfg.gamma,
        cfg.uniform_steps,
        cfg.concentrated_steps,
        cfg.tail_steps,
    );
    let run = run_schedule(&g, &dcfg, seed)?;
    let wcfg = WindowConfig::new(cfg.tau, cfg.lambda)?;
    let windows = window_reservoirs(run.stream, wcfg, s.k.expect("k"), seed)?;
    let n = cfg.n;
    let verdict = detect_dynamic(&windows, |_| n, params)?;
    row.accept = Some(verdict.accept);
    row.largest_component = Some(verdict.largest_size);
    row.threshold = Some(verdict.threshold);
    row.accept_window = verdict.window_index;
    let concentrated_start = cfg.uniform_steps + 1;
    row.early_accept = Some(verdict.window_index.is_some_and(|i| wcfg.end(i) < concentrated_start));
    if let Some(i) = verdict.window_index {
        let (_, r) = windows.iter().find(|(j, _)| *j == i).expect("accepting window");
        let single = reconstruct_edges(&r.edges(), verdict.threshold).unwrap_or_default();
        row.single_window_recall = Some(approximation_metrics(&single, &truth).recall);
    }
    let est = EstimationConfig::with_windows(cfg.windows)?;
    let estimate = estimate_dynamic(&windows, |_| n, params, &est, &wcfg)?;
    row.windows_used = Some(estimate.windows_used.len());
    score(&estimate.nodes, &truth, row);
    Ok(())
}

fn run_trial(cfg: &ExperimentConfig, s: &Setup, trial: usize) -> TrialRow {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let mut row = TrialRow {
        trial,
        seed,
        ..TrialRow::default()
    };
    let started = Instant::now();
    let outcome = match cfg.scenario {
        Scenario::Uniform | Scenario::Concentrated => static_trial(cfg, s, seed, &mut row),
        Scenario::ErCore => er_trial(cfg, seed, &mut row),
        Scenario::StepDynamics => dynamic_trial(cfg, s, seed, &mut row),
    };
    if let Err(e) = outcome {
        log::warn!("trial {trial} (seed {seed}) failed: {e}");
        row = TrialRow {
            trial,
            seed,
            error: Some(e.to_string()),
            ..TrialRow::default()
        };
    }
    if cfg.timing {
        row.elapsed_ms = Some(started.elapsed().as_millis() as u64);
    }
    row
}

/// Validates `cfg` and its feasibility, then runs every trial.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let s = setup(cfg)?;
    let rows: Vec<TrialRow> = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, &s, i)).collect();
    let failed_trials = rows.iter().filter(|r| r.error.is_some()).count();
    let aggregates = aggregate(&rows);
    Ok(Report {
        scenario: cfg.scenario,
        config: cfg.to_text(),
        n: cfg.n,
        c: s.params.map(|p| p.c),
        alpha: s.params.map(|p| p.alpha),
        reservoir_capacity: s.k,
        threshold: s.threshold,
        planted_size: s.focus.as_ref().map(Vec::len),
        er_core: s.er_core,
        failed_trials,
        rows,
        aggregates,
    })
}
