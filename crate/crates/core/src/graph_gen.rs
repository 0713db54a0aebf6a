// SPDX-License-Identifier: Apache-2.0

//! Random graph generators: the configuration model, the concentrated model
//! with a planted γ-clique, and G(n, p).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::degree_model::DegreeSequence;
use crate::error::{Error, Result};
use crate::types::{Edge, NodeId};

pub const DEFAULT_RETRY_CAP: usize = 1000;

/// Undirected multigraph on nodes `0..n`; self-loops and parallel edges are
/// allowed unless `simple` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<Edge>,
    simple: bool,
}

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.u as usize >= n || e.v as usize >= n) {
            return Err(Error::invalid(format!(
                "edge ({}, {}) out of range for n={n}",
                e.u, e.v
            )));
        }
        let simple = is_simple(&edges);
        Ok(MultiGraph { n, edges, simple })
    }

    pub(crate) fn from_parts(n: usize, edges: Vec<Edge>) -> Self {
        let simple = is_simple(&edges);
        MultiGraph { n, edges, simple }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True when the graph has no self-loop and no repeated edge.
    pub fn is_simple(&self) -> bool {
        self.simple
    }

    /// Multigraph degrees: a self-loop adds 2 to its endpoint.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for e in &self.edges {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        deg
    }

    /// Distinct non-loop edges, normalized, in first-occurrence order.
    pub fn distinct_edges(&self) -> Vec<Edge> {
        let mut seen = HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .filter(|e| !e.is_loop())
            .map(|e| e.normalized())
            .filter(|e| seen.insert(*e))
            .collect()
    }

    /// `# n=<n>` header then one `u v` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.edges.len() * 12 + 16);
        let _ = writeln!(s, "# n={}", self.n);
        for e in &self.edges {
            let _ = writeln!(s, "{} {}", e.u, e.v);
        }
        s
    }

    /// Reads the [`MultiGraph::to_text`] format. Self-loops are kept. Without
    /// a header, `n` is one more than the largest id.
    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("n=") {
                    n = Some(v.trim().parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("bad node count {v:?}"),
                    })?);
                }
                continue;
            }
            let mut it = t.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<NodeId> {
                tok.and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("expected `u v`, got {t:?}"),
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            edges.push(Edge::new(u, v));
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|e| e.u.max(e.v) as usize + 1).max().unwrap_or(0));
        MultiGraph::new(n, edges)
    }
}

fn is_simple(edges: &[Edge]) -> bool {
    let mut seen = HashSet::with_capacity(edges.len());
    edges.iter().all(|e| !e.is_loop() && seen.insert(e.normalized()))
}

/// The planted set of the concentrated model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    nodes: Vec<NodeId>,
    gamma: f64,
    delta: f64,
}

impl GroundTruth {
    pub fn new(mut nodes: Vec<NodeId>, gamma: f64, delta: f64) -> Result<Self> {
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(Error::invalid("ground truth set is empty"));
        }
        Ok(GroundTruth { nodes, gamma, delta })
    }

    /// Sorted node ids of S.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# gamma={} delta={}\n", self.gamma, self.delta);
        for v in &self.nodes {
            let _ = writeln!(s, "{v}");
        }
        s
    }

    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let (mut gamma, mut delta) = (f64::NAN, f64::NAN);
        let mut nodes = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("gamma=") {
                        gamma = v.parse().unwrap_or(f64::NAN);
                    } else if let Some(v) = tok.strip_prefix("delta=") {
                        delta = v.parse().unwrap_or(f64::NAN);
                    }
                }
                continue;
            }
            nodes.push(t.parse::<NodeId>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("expected a node id, got {t:?}"),
            })?);
        }
        GroundTruth::new(nodes, gamma, delta)
    }
}

fn stub_list(degrees: &[u32]) -> Vec<NodeId> {
    let total: usize = degrees.iter().map(|&d| d as usize).sum();
    let mut stubs = Vec::with_capacity(total);
    for (node, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node as NodeId, d as usize));
    }
    stubs
}

/// Uniform random perfect matching of `stubs`, appended to `out`.
pub(crate) fn match_stubs<R: Rng + ?Sized>(stubs: &mut [NodeId], rng: &mut R, out: &mut Vec<Edge>) {
    debug_assert!(stubs.len().is_multiple_of(2));
    stubs.shuffle(rng);
    out.extend(stubs.chunks_exact(2).map(|p| Edge::new(p[0], p[1])));
}

/// Configuration model on `seq`. Node `i` gets degree `seq.degrees()[i]`.
///
/// With `simple`, whole matchings are redrawn until the result has no
/// self-loop or repeated edge, up to [`DEFAULT_RETRY_CAP`] attempts.
pub fn configuration_model(seq: &DegreeSequence, simple: bool, seed: u64) -> Result<MultiGraph> {
    configuration_model_with_cap(seq, simple, seed, DEFAULT_RETRY_CAP)
}

pub fn configuration_model_with_cap(
    seq: &DegreeSequence,
    simple: bool,
    seed: u64,
    retry_cap: usize,
) -> Result<MultiGraph> {
    if !seq.degree_sum().is_multiple_of(2) {
        return Err(Error::invalid("degree sum is odd"));
    }
    let degrees = seq.degrees();
    let base = stub_list(&degrees);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = if simple { retry_cap.max(1) } else { 1 };
    for _ in 0..attempts {
        let mut stubs = base.clone();
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        match_stubs(&mut stubs, &mut rng, &mut edges);
        let g = MultiGraph::from_parts(degrees.len(), edges);
        if !simple || g.simple {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed {
        attempts,
        reason: "no simple matching found; simple graphs are rare for this sequence".into(),
    })
}

/// The `⌊δ√n⌋` highest-degree nodes (ties to the lowest id), each of degree
/// at least `δ√n`: the set the concentrated model plants on.
pub fn planted_set(seq: &DegreeSequence, delta: f64) -> Result<Vec<NodeId>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let degrees = seq.degrees();
    let n = degrees.len();
    let min_degree = delta * (n as f64).sqrt();
    let size = min_degree.floor() as usize;
    if size < 2 {
        return Err(Error::invalid(format!(
            "planted set size floor(delta*sqrt(n)) = {size} < 2"
        )));
    }
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    order.sort_by(|&a, &b| degrees[b as usize].cmp(&degrees[a as usize]).then(a.cmp(&b)));
    let planted: Vec<NodeId> = order[..size.min(n)].to_vec();
    let eligible = planted
        .iter()
        .filter(|&&v| degrees[v as usize] as f64 >= min_degree)
        .count();
    if planted.len() < size || eligible < size {
        return Err(Error::invalid(format!(
            "need {size} nodes of degree >= {min_degree:.2}, found {eligible} (max degree {})",
            seq.max_degree()
        )));
    }
    Ok(planted)
}

/// Concentrated model: plants G(|S|, γ) on the `⌊δ√n⌋` highest-degree nodes
/// (ties to the lowest id), then matches all remaining stubs uniformly.
pub fn concentrated_model(
    seq: &DegreeSequence,
    gamma: f64,
    delta: f64,
    seed: u64,
) -> Result<(MultiGraph, GroundTruth)> {
    concentrated_model_with(seq, gamma, delta, false, seed)
}

/// As [`concentrated_model`]; with `simple`, only the residual matching is
/// redrawn until the whole graph is simple. The planted edges stay fixed.
pub fn concentrated_model_with(
    seq: &DegreeSequence,
    gamma: f64,
    delta: f64,
    simple: bool,
    seed: u64,
) -> Result<(MultiGraph, GroundTruth)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let degrees = seq.degrees();
    let n = degrees.len();
    let planted = planted_set(seq, delta)?;
    let size = planted.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each planted node reserves one marked stub per partner in S. Stubs of a
    // node are exchangeable, so only the per-node free counts are tracked.
    let mut free: Vec<u32> = degrees.clone();
    let mut planted_edges = Vec::new();
    for a in 0..size {
        for b in (a + 1)..size {
            if gamma >= 1.0 || rng.random::<f64>() < gamma {
                let (u, v) = (planted[a], planted[b]);
                free[u as usize] -= 1;
                free[v as usize] -= 1;
                planted_edges.push(Edge::new(u, v));
            }
        }
    }
    let residual = stub_list(&free);
    if !residual.len().is_multiple_of(2) {
        return Err(Error::Internal("odd residual stub count".into()));
    }
    let attempts = if simple { DEFAULT_RETRY_CAP } else { 1 };
    let truth = GroundTruth::new(planted, gamma, delta)?;
    for _ in 0..attempts {
        let mut stubs = residual.clone();
        let mut edges = planted_edges.clone();
        edges.reserve(stubs.len() / 2);
        match_stubs(&mut stubs, &mut rng, &mut edges);
        let g = MultiGraph::from_parts(n, edges);
        if !simple || g.simple {
            return Ok((g, truth));
        }
    }
    Err(Error::GenerationFailed {
        attempts,
        reason: "residual matching never produced a simple graph".into(),
    })
}

/// Fraction of the `|S|(|S|−1)/2` pairs of `set` joined by at least one edge.
/// Self-loops are ignored and parallel edges count once.
pub fn gamma_density(g: &MultiGraph, set: &[NodeId]) -> Result<f64> {
    let mut member = vec![false; g.n()];
    let mut size = 0usize;
    for &v in set {
        let slot = member
            .get_mut(v as usize)
            .ok_or_else(|| Error::invalid(format!("node {v} out of range")))?;
        if !*slot {
            *slot = true;
            size += 1;
        }
    }
    if size < 2 {
        return Err(Error::invalid("gamma density needs |S| >= 2"));
    }
    let internal: HashSet<Edge> = g
        .edges()
        .iter()
        .filter(|e| !e.is_loop() && member[e.u as usize] && member[e.v as usize])
        .map(|e| e.normalized())
        .collect();
    let pairs = size * (size - 1) / 2;
    Ok(internal.len() as f64 / pairs as f64)
}

/// G(n, p) by geometric skipping over the lexicographic list of pairs.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<MultiGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
    }
    let mut edges = Vec::new();
    if n < 2 || p == 0.0 {
        return Ok(MultiGraph::from_parts(n, edges));
    }
    if p == 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push(Edge::new(w as NodeId, v as NodeId));
            }
        }
        return Ok(MultiGraph::from_parts(n, edges));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let skip = Geometric::new(p).map_err(|e| Error::invalid(e.to_string()))?;
    // Pairs (w, v) with w < v, enumerated row by row.
    let (mut v, mut w) = (1u64, 0u64);
    let n = n as u64;
    let mut first = true;
    loop {
        let gap = skip.sample(&mut rng);
        w = if first {
            gap
        } else {
            w.saturating_add(1).saturating_add(gap)
        };
        first = false;
        while v < n && w >= v {
            w -= v;
            v += 1;
        }
        if v >= n {
            break;
        }
        edges.push(Edge::new(w as NodeId, v as NodeId));
    }
    Ok(MultiGraph::from_parts(n as usize, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree_model::zipf_sequence;

    #[test]
    fn single_edge_sequence() {
        let seq = DegreeSequence::from_counts([(1, 2)], 1.0).unwrap();
        for seed in 0..20 {
            let g = configuration_model(&seq, true, seed).unwrap();
            assert_eq!(g.distinct_edges(), vec![Edge::new(0, 1)]);
        }
    }

    #[test]
    fn triangle_sequence_simple_is_always_triangle() {
        let seq = DegreeSequence::from_counts([(2, 3)], 1.0).unwrap();
        for seed in 0..2_000 {
            let g = configuration_model(&seq, true, seed).unwrap();
            assert!(g.is_simple());
            assert_eq!(g.distinct_edges().len(), 3);
        }
    }

    #[test]
    fn configuration_model_preserves_degrees() {
        let seq = zipf_sequence(10_000).unwrap();
        let g = configuration_model(&seq, false, 7).unwrap();
        assert_eq!(g.degrees(), seq.degrees());
    }

    #[test]
    fn simple_request_on_heavy_tail_fails_cleanly() {
        let seq = zipf_sequence(10_000).unwrap();
        let err = configuration_model_with_cap(&seq, true, 1, 5).unwrap_err();
        assert!(matches!(err, Error::GenerationFailed { attempts: 5, .. }));
    }

    #[test]
    fn same_seed_same_graph() {
        let seq = zipf_sequence(2_000).unwrap();
        assert_eq!(
            configuration_model(&seq, false, 3).unwrap(),
            configuration_model(&seq, false, 3).unwrap()
        );
        assert_ne!(
            configuration_model(&seq, false, 3).unwrap(),
            configuration_model(&seq, false, 4).unwrap()
        );
    }

    #[test]
    fn density_examples() {
        let tri = MultiGraph::new(3, vec![Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 0)]).unwrap();
        assert_eq!(gamma_density(&tri, &[0, 1, 2]).unwrap(), 1.0);
        let path = MultiGraph::new(3, vec![Edge::new(0, 1), Edge::new(1, 2)]).unwrap();
        assert!((gamma_density(&path, &[0, 1, 2]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let multi = MultiGraph::new(
            3,
            vec![Edge::new(0, 1), Edge::new(1, 0), Edge::new(2, 2), Edge::new(1, 2)],
        )
        .unwrap();
        assert!((gamma_density(&multi, &[0, 1, 2]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(gamma_density(&tri, &[1]).is_err());
    }

    #[test]
    fn clique_is_planted_with_gamma_one() {
        let seq = zipf_sequence(10_000).unwrap();
        let delta = seq.c().sqrt() / 2.0;
        let (g, truth) = concentrated_model(&seq, 1.0, delta, 11).unwrap();
        assert_eq!(truth.len(), (delta * 100.0).floor() as usize);
        assert_eq!(gamma_density(&g, truth.nodes()).unwrap(), 1.0);
        let want = seq.degrees();
        let got = g.degrees();
        assert!(got.iter().zip(&want).all(|(a, b)| a == b));
        let min_deg = delta * 100.0;
        assert!(truth.nodes().iter().all(|&v| want[v as usize] as f64 >= min_deg));
    }

    #[test]
    fn concentrated_rejects_infeasible_delta() {
        let seq = zipf_sequence(10_000).unwrap();
        assert!(matches!(
            concentrated_model(&seq, 1.0, 2.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(concentrated_model(&seq, 0.0, 0.3, 0).is_err());
        assert!(concentrated_model(&seq, 1.5, 0.3, 0).is_err());
    }

    #[test]
    fn er_extremes() {
        assert_eq!(erdos_renyi(50, 0.0, 1).unwrap().edge_count(), 0);
        let k = erdos_renyi(30, 1.0, 1).unwrap();
        assert_eq!(k.edge_count(), 30 * 29 / 2);
        assert!(k.is_simple());
        assert!(erdos_renyi(10, 1.5, 1).is_err());
        let g = erdos_renyi(2_000, 0.01, 9).unwrap();
        assert!(g.is_simple());
    }

    #[test]
    fn text_formats_round_trip() {
        let g = MultiGraph::new(4, vec![Edge::new(0, 1), Edge::new(2, 2), Edge::new(3, 1)]).unwrap();
        assert_eq!(MultiGraph::from_text(g.to_text().as_bytes()).unwrap(), g);
        let t = GroundTruth::new(vec![5, 2, 9], 0.5, 0.25).unwrap();
        assert_eq!(GroundTruth::from_text(t.to_text().as_bytes()).unwrap(), t);
    }
}
