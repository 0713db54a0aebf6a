// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! scenario = concentrated
//! n = 100000
//! gamma = 1
//! delta = 0.3
//! trials = 20
//! seed = 7
//! ```
//!
//! Keys: `scenario` (uniform, concentrated, er-core, step-dynamics), `n`,
//! `gamma`, `delta`, `epsilon`, `alpha`, `c`, `threshold_coeff`, `c1`,
//! `tau`, `lambda`, `q`, `uniform_steps`, `concentrated_steps`,
//! `tail_steps`, `windows`, `trials`, `seed`, `timing`, `output`.
//! `alpha` and `c` default to the derived values when omitted.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Uniform,
    Concentrated,
    ErCore,
    StepDynamics,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Uniform => "uniform",
            Scenario::Concentrated => "concentrated",
            Scenario::ErCore => "er-core",
            Scenario::StepDynamics => "step-dynamics",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Scenario::Uniform),
            "concentrated" => Ok(Scenario::Concentrated),
            "er-core" => Ok(Scenario::ErCore),
            "step-dynamics" => Ok(Scenario::StepDynamics),
            other => Err(Error::invalid(format!("unknown scenario '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: u64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub threshold_coeff: f64,
    pub c1: f64,
    pub tau: u64,
    pub lambda: u64,
    pub q: usize,
    pub uniform_steps: u64,
    pub concentrated_steps: u64,
    pub tail_steps: u64,
    /// Independent accepting windows unioned by the dynamic estimator.
    pub windows: usize,
    pub trials: usize,
    pub seed: u64,
    /// Record per-trial wall-clock time. Off by default so reports are
    /// byte-identical across runs.
    pub timing: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, n: u64) -> Self {
        ExperimentConfig {
            scenario,
            n,
            gamma: 1.0,
            delta: 0.3,
            epsilon: crate::detector::DEFAULT_EPSILON,
            alpha: None,
            c: None,
            threshold_coeff: 1.0,
            c1: 2.0,
            tau: 100,
            lambda: 50,
            q: 2,
            uniform_steps: 0,
            concentrated_steps: 0,
            tail_steps: 0,
            windows: 2,
            trials: 1,
            seed: 0,
            timing: false,
            output: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let scenario = pairs
            .iter()
            .find(|(_, k, _)| k == "scenario")
            .ok_or_else(|| Error::invalid("config is missing 'scenario'"))?
            .2
            .parse()?;
        let n = pairs
            .iter()
            .find(|(_, k, _)| k == "n")
            .ok_or_else(|| Error::invalid("config is missing 'n'"))?
            .2
            .as_str();
        let n = parse_value(n, 0, "n")?;
        let mut cfg = ExperimentConfig::new(scenario, n);
        for (line, k, v) in &pairs {
            let v = v.as_str();
            let line = *line;
            match k.as_str() {
                "scenario" | "n" => {}
                "gamma" => cfg.gamma = parse_value(v, line, k)?,
                "delta" => cfg.delta = parse_value(v, line, k)?,
                "epsilon" => cfg.epsilon = parse_value(v, line, k)?,
                "alpha" => cfg.alpha = parse_auto(v, line, k)?,
                "c" => cfg.c = parse_auto(v, line, k)?,
                "threshold_coeff" => cfg.threshold_coeff = parse_value(v, line, k)?,
                "c1" => cfg.c1 = parse_value(v, line, k)?,
                "tau" => cfg.tau = parse_value(v, line, k)?,
                "lambda" => cfg.lambda = parse_value(v, line, k)?,
                "q" => cfg.q = parse_value(v, line, k)?,
                "uniform_steps" => cfg.uniform_steps = parse_value(v, line, k)?,
                "concentrated_steps" => cfg.concentrated_steps = parse_value(v, line, k)?,
                "tail_steps" => cfg.tail_steps = parse_value(v, line, k)?,
                "windows" => cfg.windows = parse_value(v, line, k)?,
                "trials" => cfg.trials = parse_value(v, line, k)?,
                "seed" => cfg.seed = parse_value(v, line, k)?,
                "timing" => cfg.timing = parse_value(v, line, k)?,
                "output" => cfg.output = Some(PathBuf::from(v)),
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let auto = |v: Option<f64>| v.map_or("auto".to_string(), |x| x.to_string());
        let _ = writeln!(s, "scenario = {}", self.scenario);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "alpha = {}", auto(self.alpha));
        let _ = writeln!(s, "c = {}", auto(self.c));
        let _ = writeln!(s, "threshold_coeff = {}", self.threshold_coeff);
        let _ = writeln!(s, "c1 = {}", self.c1);
        let _ = writeln!(s, "tau = {}", self.tau);
        let _ = writeln!(s, "lambda = {}", self.lambda);
        let _ = writeln!(s, "q = {}", self.q);
        let _ = writeln!(s, "uniform_steps = {}", self.uniform_steps);
        let _ = writeln!(s, "concentrated_steps = {}", self.concentrated_steps);
        let _ = writeln!(s, "tail_steps = {}", self.tail_steps);
        let _ = writeln!(s, "windows = {}", self.windows);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "timing = {}", self.timing);
        if let Some(p) = &self.output {
            let _ = writeln!(s, "output = {}", p.display());
        }
        s
    }

    /// Parameter checks that do not need the degree sequence. Scenario
    /// feasibility against the sequence is checked by the runner before any
    /// trial starts.
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::invalid(format!("n must be at least 4, got {}", self.n)));
        }
        if self.n > u32::MAX as u64 {
            return Err(Error::invalid("n exceeds the node id range"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("threshold_coeff", self.threshold_coeff),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("c", self.c)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        match self.scenario {
            Scenario::ErCore => {
                if !(self.c1 > 0.0 && self.c1.is_finite()) {
                    return Err(Error::invalid(format!("c1 must be positive, got {}", self.c1)));
                }
            }
            Scenario::StepDynamics => {
                crate::stream::WindowConfig::new(self.tau, self.lambda)?;
                if self.q < 2 {
                    return Err(Error::invalid(format!("q must be at least 2, got {}", self.q)));
                }
                if self.windows == 0 {
                    return Err(Error::invalid("windows must be positive"));
                }
            }
            Scenario::Uniform | Scenario::Concentrated => {}
        }
        Ok(())
    }
}

fn parse_value<T: FromStr>(v: &str, line: usize, key: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e: T::Err| Error::Parse {
        line,
        message: format!("bad value for '{key}': {e}"),
    })
}

fn parse_auto(v: &str, line: usize, key: &str) -> Result<Option<f64>> {
    if v == "auto" {
        Ok(None)
    } else {
        parse_value(v, line, key).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let cfg = ExperimentConfig::parse("# demo\nscenario = uniform\nn = 1000\ntrials=3\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::Uniform);
        assert_eq!((cfg.n, cfg.trials, cfg.alpha), (1000, 3, None));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::new(Scenario::StepDynamics, 5000);
        cfg.alpha = Some(3.5);
        cfg.output = Some("out/run".into());
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors() {
        assert!(ExperimentConfig::parse("n = 10").is_err());
        assert!(ExperimentConfig::parse("scenario = bogus\nn = 10").is_err());
        let e = ExperimentConfig::parse("scenario = uniform\nn = 10\nfoo = 1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = ExperimentConfig::parse("scenario = uniform\nn = 10\ngamma = x").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let mut cfg = ExperimentConfig::new(Scenario::StepDynamics, 100);
        cfg.lambda = 30;
        assert!(cfg.validate().is_err());
    }
}
