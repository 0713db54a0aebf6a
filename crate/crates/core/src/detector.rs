// SPDX-License-Identifier: Apache-2.0

//! Reservoir-based detection and reconstruction of a large γ-clique.
//!
//! The static detector accepts when the largest connected component of the
//! reservoir reaches `⌈coeff · n^{1/8} · ln² n⌉` nodes; reconstruction returns
//! the 2-core of that component. The windowed variants apply the same test to
//! every window reservoir and, for estimation, union the 2-cores of the
//! first `I` pairwise non-overlapping accepting windows.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_gen::GroundTruth;
use crate::sketch::{connected_components, two_core};
use crate::stream::{Reservoir, WindowConfig};
use crate::types::{Edge, NodeId};

pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    pub gamma: f64,
    pub delta: f64,
    /// Slack in the sampling-multiplier bound `α > (1+ε)/(γδ)`.
    pub epsilon: f64,
    /// Sampling multiplier: the reservoir samples at rate about `α/√n`.
    pub alpha: f64,
    /// Zipf constant of the underlying degree law.
    pub c: f64,
    pub threshold_coeff: f64,
}

impl DetectionParams {
    /// Defaults: `ε = 0.1`, `α = 2(1+ε)/(γδ)`, threshold coefficient 1.
    pub fn derived(gamma: f64, delta: f64, c: f64) -> Result<Self> {
        let epsilon = DEFAULT_EPSILON;
        let p = DetectionParams {
            gamma,
            delta,
            epsilon,
            alpha: 2.0 * (1.0 + epsilon) / (gamma * delta),
            c,
            threshold_coeff: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_threshold_coeff(mut self, coeff: f64) -> Self {
        self.threshold_coeff = coeff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {}", self.gamma)));
        }
        positive("delta", self.delta)?;
        positive("epsilon", self.epsilon)?;
        positive("alpha", self.alpha)?;
        positive("c", self.c)?;
        positive("threshold_coeff", self.threshold_coeff)
    }

    /// Whether `α > (1+ε)/(γδ)`, the sampling rate needed for a giant
    /// component inside a planted γ-clique of size `δ√n`.
    pub fn satisfies_accept_hypothesis(&self) -> bool {
        self.alpha > (1.0 + self.epsilon) / (self.gamma * self.delta)
    }
}

/// `k = ⌈c·α·√n·ln n / 4⌉`.
pub fn reservoir_capacity(n: u64, params: &DetectionParams) -> Result<usize> {
    if n < 4 {
        return Err(Error::invalid(format!("reservoir capacity needs n >= 4, got {n}")));
    }
    params.validate()?;
    let nf = n as f64;
    Ok((params.c * params.alpha * nf.sqrt() * nf.ln() / 4.0).ceil() as usize)
}

/// The real-valued bound `coeff · n^{1/8} · ln² n` before rounding up.
pub fn threshold_bound(n: f64, coeff: f64) -> f64 {
    let ln = n.ln();
    coeff * n.powf(0.125) * ln * ln
}

/// `T = ⌈coeff · n^{1/8} · ln² n⌉`.
pub fn detection_threshold(n: u64, coeff: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::invalid(format!("threshold needs n >= 2, got {n}")));
    }
    if !(coeff > 0.0 && coeff.is_finite()) {
        return Err(Error::invalid(format!(
            "threshold coefficient must be positive, got {coeff}"
        )));
    }
    Ok(threshold_bound(n as f64, coeff).ceil() as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionVerdict {
    pub accept: bool,
    pub largest_size: usize,
    pub threshold: usize,
    pub window_index: Option<usize>,
}

/// Threshold test on an arbitrary edge snapshot.
pub fn detect_edges(edges: &[Edge], threshold: usize) -> DetectionVerdict {
    let largest_size = connected_components(edges).largest().len();
    DetectionVerdict {
        accept: largest_size >= threshold,
        largest_size,
        threshold,
        window_index: None,
    }
}

/// Reconstruction on an arbitrary edge snapshot: `None` below the
/// threshold, otherwise the 2-core of the largest component.
pub fn reconstruct_edges(edges: &[Edge], threshold: usize) -> Option<Vec<NodeId>> {
    let summary = connected_components(edges);
    let largest = summary.largest();
    (largest.len() >= threshold).then(|| two_core(largest, edges))
}

pub fn detect_static(r: &Reservoir, n: u64, params: &DetectionParams) -> Result<DetectionVerdict> {
    let threshold = detection_threshold(n, params.threshold_coeff)?;
    Ok(detect_edges(&r.edges(), threshold))
}

pub fn reconstruct_static(r: &Reservoir, n: u64, params: &DetectionParams) -> Result<Option<Vec<NodeId>>> {
    let threshold = detection_threshold(n, params.threshold_coeff)?;
    Ok(reconstruct_edges(&r.edges(), threshold))
}

/// Accepts at the first window whose largest component reaches the
/// threshold for that window's node bound `node_bound(i)`.
pub fn detect_dynamic(
    windows: &[(usize, Reservoir)],
    node_bound: impl Fn(usize) -> u64,
    params: &DetectionParams,
) -> Result<DetectionVerdict> {
    let mut best = DetectionVerdict {
        accept: false,
        largest_size: 0,
        threshold: 0,
        window_index: None,
    };
    for (i, r) in windows {
        let threshold = detection_threshold(node_bound(*i), params.threshold_coeff)?;
        let mut v = detect_edges(&r.edges(), threshold);
        if v.accept {
            v.window_index = Some(*i);
            return Ok(v);
        }
        if v.largest_size >= best.largest_size {
            best = v;
        }
    }
    Ok(best)
}

/// How many independent accepting windows the dynamic estimator unions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub epsilon_tol: f64,
    pub rho: f64,
    pub windows: usize,
}

impl EstimationConfig {
    /// `I = ⌈ln ε / ln ρ⌉` for target miss rate `ε` and per-window miss
    /// rate `ρ`.
    pub fn new(epsilon_tol: f64, rho: f64) -> Result<Self> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(epsilon_tol) || !open_unit(rho) {
            return Err(Error::invalid(format!(
                "epsilon_tol and rho must lie in (0, 1), got {epsilon_tol} and {rho}"
            )));
        }
        let ratio = epsilon_tol.ln() / rho.ln();
        // Guard against ln round-off turning an exact integer ratio into k + 1e-16.
        let windows = ((ratio - 1e-9).ceil() as usize).max(1);
        Ok(EstimationConfig {
            epsilon_tol,
            rho,
            windows,
        })
    }

    pub fn with_windows(windows: usize) -> Result<Self> {
        if windows == 0 {
            return Err(Error::invalid("window count must be positive"));
        }
        Ok(EstimationConfig {
            epsilon_tol: f64::NAN,
            rho: f64::NAN,
            windows,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicEstimate {
    pub nodes: Vec<NodeId>,
    pub windows_used: Vec<usize>,
    /// The stream ended before `I` independent accepting windows were seen.
    pub insufficient_windows: bool,
}

/// Union of the 2-cores of the first `est.windows` accepting windows whose
/// indices are pairwise at least `τ/λ` apart, taken greedily in order.
pub fn estimate_dynamic(
    windows: &[(usize, Reservoir)],
    node_bound: impl Fn(usize) -> u64,
    params: &DetectionParams,
    est: &EstimationConfig,
    cfg: &WindowConfig,
) -> Result<DynamicEstimate> {
    let stride = cfg.stride();
    let mut union: BTreeSet<NodeId> = BTreeSet::new();
    let mut used: Vec<usize> = Vec::new();
    for (i, r) in windows {
        if used.len() == est.windows {
            break;
        }
        if used.last().is_some_and(|&last| *i < last + stride) {
            continue;
        }
        let threshold = detection_threshold(node_bound(*i), params.threshold_coeff)?;
        if let Some(core) = reconstruct_edges(&r.edges(), threshold) {
            union.extend(core);
            used.push(*i);
        }
    }
    let insufficient_windows = used.len() < est.windows;
    Ok(DynamicEstimate {
        nodes: union.into_iter().collect(),
        windows_used: used,
        insufficient_windows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxScore {
    pub missed: usize,
    pub spurious: usize,
    /// `None` when the estimate is empty.
    pub precision: Option<f64>,
    pub recall: f64,
}

pub fn approximation_metrics(estimate: &[NodeId], truth: &GroundTruth) -> ApproxScore {
    let s_hat: BTreeSet<NodeId> = estimate.iter().copied().collect();
    let s: BTreeSet<NodeId> = truth.nodes().iter().copied().collect();
    let hit = s_hat.intersection(&s).count();
    ApproxScore {
        missed: s.len() - hit,
        spurious: s_hat.len() - hit,
        precision: (!s_hat.is_empty()).then(|| hit as f64 / s_hat.len() as f64),
        recall: hit as f64 / s.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::TimestampedEdge;

    fn params(alpha: f64, c: f64) -> DetectionParams {
        DetectionParams::derived(1.0, 1.0, c).unwrap().with_alpha(alpha)
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(reservoir_capacity(16, &params(1.0, 1.0)).unwrap(), 3);
        let c = 0.6079;
        let k = reservoir_capacity(10_000, &params(2.0, c)).unwrap();
        let want = (c * 2.0 * 100.0 * (1e4f64).ln() / 4.0).ceil() as usize;
        assert_eq!(k, want);
        assert!((279..=281).contains(&k), "k = {k}");
        let k2 = reservoir_capacity(10_000, &params(4.0, c)).unwrap();
        assert!(k2.abs_diff(2 * k) <= 1);
        assert!(reservoir_capacity(3, &params(1.0, 1.0)).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(detection_threshold(100_000, 1.0).unwrap(), 559);
        assert_eq!(threshold_bound(8f64.exp(), 1.0).ceil() as usize, 174);
        let one = threshold_bound(5_000.0, 1.0);
        assert!((threshold_bound(5_000.0, 2.0) - 2.0 * one).abs() < 1e-9);
        assert!(detection_threshold(1, 1.0).is_err());
        assert!(detection_threshold(10, 0.0).is_err());
    }

    #[test]
    fn derived_alpha_satisfies_hypothesis() {
        let p = DetectionParams::derived(0.5, 0.3, 0.61).unwrap();
        assert!(p.satisfies_accept_hypothesis());
        assert!((p.alpha - 2.2 / 0.15).abs() < 1e-12);
        assert!(DetectionParams::derived(0.0, 0.3, 0.61).is_err());
    }

    #[test]
    fn empty_reservoir_rejects() {
        let r = Reservoir::new(10, 0);
        let v = detect_static(&r, 10_000, &params(1.0, 0.6)).unwrap();
        assert!(!v.accept);
        assert_eq!(v.largest_size, 0);
    }

    #[test]
    fn forced_threshold_reconstructs_triangle() {
        let tri = [Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)];
        assert_eq!(reconstruct_edges(&tri, 3), Some(vec![0, 1, 2]));
        assert_eq!(reconstruct_edges(&tri, 4), None);
        assert!(detect_edges(&tri, 3).accept);
    }

    #[test]
    fn estimation_window_count() {
        assert_eq!(EstimationConfig::new(0.01, 0.1).unwrap().windows, 2);
        assert_eq!(EstimationConfig::new(0.05, 0.5).unwrap().windows, 5);
        assert!(EstimationConfig::new(1.0, 0.5).is_err());
    }

    fn window_with(edges: &[(NodeId, NodeId)], index: usize) -> (usize, Reservoir) {
        let mut r = Reservoir::with_stream(100, 0, index as u64);
        r.extend(edges.iter().map(|&(u, v)| TimestampedEdge::new(u, v, 0)));
        (index, r)
    }

    #[test]
    fn dynamic_detection_reports_window() {
        let p = params(1.0, 1.0).with_threshold_coeff(1e-3);
        let none = vec![window_with(&[], 1), window_with(&[], 2)];
        assert!(!detect_dynamic(&none, |_| 1000, &p).unwrap().accept);
        let threshold = detection_threshold(1000, 1e-3).unwrap();
        assert_eq!(threshold, 1);
        let hit = vec![
            window_with(&[], 1),
            window_with(&[(0, 1)], 2),
            window_with(&[(4, 5)], 3),
        ];
        let v = detect_dynamic(&hit, |_| 1000, &p).unwrap();
        assert_eq!(v.window_index, Some(2));
    }

    #[test]
    fn estimation_skips_overlapping_windows() {
        let cfg = WindowConfig::new(4, 2).unwrap();
        let p = params(1.0, 1.0).with_threshold_coeff(1e-3);
        let tri = |a: NodeId| [(a, a + 1), (a + 1, a + 2), (a + 2, a)];
        let windows = vec![
            window_with(&tri(0), 1),
            window_with(&tri(10), 2),
            window_with(&tri(20), 3),
            window_with(&tri(30), 4),
        ];
        let est = EstimationConfig::with_windows(2).unwrap();
        let out = estimate_dynamic(&windows, |_| 1000, &p, &est, &cfg).unwrap();
        assert_eq!(out.windows_used, vec![1, 3]);
        assert_eq!(out.nodes, vec![0, 1, 2, 20, 21, 22]);
        assert!(!out.insufficient_windows);
        let est3 = EstimationConfig::with_windows(3).unwrap();
        let out = estimate_dynamic(&windows, |_| 1000, &p, &est3, &cfg).unwrap();
        assert!(out.insufficient_windows);
    }

    #[test]
    fn single_window_estimate_equals_static_reconstruction() {
        let cfg = WindowConfig::new(4, 2).unwrap();
        let p = params(1.0, 1.0).with_threshold_coeff(1e-3);
        let w = window_with(&[(0, 1), (1, 2), (2, 0), (2, 3)], 1);
        let est = EstimationConfig::with_windows(1).unwrap();
        let out = estimate_dynamic(std::slice::from_ref(&w), |_| 1000, &p, &est, &cfg).unwrap();
        assert_eq!(Some(out.nodes), reconstruct_static(&w.1, 1000, &p).unwrap());
    }

    #[test]
    fn metrics_examples() {
        let truth = GroundTruth::new((0..100).collect(), 1.0, 1.0).unwrap();
        let exact = approximation_metrics(&(0..100).collect::<Vec<_>>(), &truth);
        assert_eq!(
            (exact.missed, exact.spurious, exact.precision, exact.recall),
            (0, 0, Some(1.0), 1.0)
        );
        let empty = approximation_metrics(&[], &truth);
        assert_eq!((empty.recall, empty.precision), (0.0, None));
        let mixed: Vec<NodeId> = (0..90).chain(1000..1010).collect();
        let s = approximation_metrics(&mixed, &truth);
        assert_eq!((s.missed, s.spurious), (10, 10));
        assert!((s.precision.unwrap() - 0.9).abs() < 1e-15 && (s.recall - 0.9).abs() < 1e-15);
    }
}
