// SPDX-License-Identifier: Apache-2.0

//! Experiment plumbing: configs, trial runner, reports, statistics helpers
//! and brute-force oracles for cross-checking the main algorithms.

pub mod config;
pub mod er_core;
pub mod experiment;
pub mod oracle;
pub mod stats;

pub use config::{ExperimentConfig, Scenario};
pub use er_core::{solve_er_core, ErCoreSolution};
pub use experiment::{run_experiment, write_report, Aggregate, Report, TrialRow};
