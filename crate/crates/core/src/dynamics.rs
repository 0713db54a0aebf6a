// SPDX-License-Identifier: Apache-2.0

//! Degree-preserving rewiring chains on multigraphs.
//!
//! Every step removes `q` edges chosen uniformly from the edge multiset and
//! rematches the `2q` freed stubs. The uniform chain rematches all stubs
//! together; the S-concentrated chain partitions them by class (inside S,
//! outside S, cut) and may convert cut stubs into internal edges until the
//! γ-clique predicate on S holds.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_gen::{match_stubs, MultiGraph};
use crate::stream::TimestampedEdge;
use crate::types::{Edge, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    Uniform,
    Concentrated { gamma: f64 },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Uniform => "uniform",
            Mode::Concentrated { .. } => "concentrated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub q: usize,
    /// The planted set S. Required when any phase is concentrated.
    pub focus: Vec<NodeId>,
    /// `(mode, steps)` phases run in order.
    pub schedule: Vec<(Mode, u64)>,
}

impl DynamicsConfig {
    pub fn uniform(q: usize, steps: u64) -> Self {
        DynamicsConfig {
            q,
            focus: Vec::new(),
            schedule: vec![(Mode::Uniform, steps)],
        }
    }

    pub fn concentrated(q: usize, focus: Vec<NodeId>, gamma: f64, steps: u64) -> Self {
        DynamicsConfig {
            q,
            focus,
            schedule: vec![(Mode::Concentrated { gamma }, steps)],
        }
    }

    /// Uniform, then concentrated on `focus`, then uniform again.
    pub fn step(q: usize, focus: Vec<NodeId>, gamma: f64, before: u64, during: u64, after: u64) -> Self {
        DynamicsConfig {
            q,
            focus,
            schedule: vec![
                (Mode::Uniform, before),
                (Mode::Concentrated { gamma }, during),
                (Mode::Uniform, after),
            ],
        }
    }

    pub fn total_steps(&self) -> u64 {
        self.schedule.iter().map(|(_, s)| s).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::invalid(format!("q must be at least 2, got {}", self.q)));
        }
        for (mode, _) in &self.schedule {
            if let Mode::Concentrated { gamma } = mode {
                if !(*gamma > 0.0 && *gamma <= 1.0) {
                    return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
                }
                if self.focus.len() < 2 {
                    return Err(Error::invalid(
                        "a concentrated phase needs a focus set of at least 2 nodes",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Which branch a step took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "case")]
pub enum StepCase {
    Uniform,
    /// Predicate held before removal; classes rematched separately. When the
    /// internal rematch would break the predicate, the removed internal
    /// edges are put back instead.
    Maintain {
        internal_restored: bool,
    },
    /// Predicate unreachable this step: all but at most one cut pair converted.
    ConvertAll {
        converted: usize,
    },
    /// Exactly enough cut pairs converted to reach the predicate.
    ConvertPartial {
        converted: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub tick: u64,
    pub removed: Vec<Edge>,
    pub added: Vec<Edge>,
    pub case: StepCase,
}

/// Multiplicities of the pairs inside S, kept in step with the edge list.
#[derive(Clone, Debug)]
struct Focus {
    member: Vec<bool>,
    size: usize,
    pairs: HashMap<(NodeId, NodeId), u32>,
    internal: usize,
    cut: usize,
}

impl Focus {
    fn new(n: usize, nodes: &[NodeId]) -> Result<Self> {
        let mut member = vec![false; n];
        for &v in nodes {
            let slot = member
                .get_mut(v as usize)
                .ok_or_else(|| Error::invalid(format!("focus node {v} out of range for n = {n}")))?;
            *slot = true;
        }
        let size = member.iter().filter(|&&m| m).count();
        Ok(Focus {
            member,
            size,
            pairs: HashMap::new(),
            internal: 0,
            cut: 0,
        })
    }

    fn contains(&self, v: NodeId) -> bool {
        self.member[v as usize]
    }

    fn add(&mut self, e: Edge) {
        match (self.contains(e.u), self.contains(e.v)) {
            (true, true) => {
                self.internal += 1;
                if !e.is_loop() {
                    let k = e.normalized();
                    *self.pairs.entry((k.u, k.v)).or_default() += 1;
                }
            }
            (false, false) => {}
            _ => self.cut += 1,
        }
    }

    fn remove(&mut self, e: Edge) {
        match (self.contains(e.u), self.contains(e.v)) {
            (true, true) => {
                self.internal -= 1;
                if !e.is_loop() {
                    let k = e.normalized();
                    let m = self.pairs.get_mut(&(k.u, k.v)).expect("tracked pair");
                    *m -= 1;
                    if *m == 0 {
                        self.pairs.remove(&(k.u, k.v));
                    }
                }
            }
            (false, false) => {}
            _ => self.cut -= 1,
        }
    }

    fn distinct(&self) -> usize {
        self.pairs.len()
    }

    /// Smallest distinct internal pair count with density at least `gamma`.
    fn target(&self, gamma: f64) -> usize {
        let pairs = (self.size * (self.size - 1) / 2) as f64;
        (gamma * pairs - 1e-9).ceil().max(0.0) as usize
    }
}

/// A multigraph evolving under the chain, with its step log.
#[derive(Clone, Debug)]
pub struct ChainState {
    n: usize,
    edges: Vec<Edge>,
    tick: u64,
    focus: Option<Focus>,
    log: Vec<StepRecord>,
}

impl ChainState {
    pub fn new(graph: MultiGraph) -> Self {
        ChainState {
            n: graph.n(),
            edges: graph.into_edges(),
            tick: 0,
            focus: None,
            log: Vec::new(),
        }
    }

    /// A chain that tracks the pairs inside `focus`, as needed by
    /// [`ChainState::step_concentrated`].
    pub fn with_focus(graph: MultiGraph, focus: &[NodeId]) -> Result<Self> {
        let mut st = ChainState::new(graph);
        let mut f = Focus::new(st.n, focus)?;
        for &e in &st.edges {
            f.add(e);
        }
        st.focus = Some(f);
        Ok(st)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn graph(&self) -> MultiGraph {
        MultiGraph::from_parts(self.n, self.edges.clone())
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n];
        for e in &self.edges {
            d[e.u as usize] += 1;
            d[e.v as usize] += 1;
        }
        d
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<StepRecord> {
        std::mem::take(&mut self.log)
    }

    /// Distinct internal pairs over `C(|S|, 2)`, when a focus is tracked.
    pub fn focus_density(&self) -> Option<f64> {
        self.focus.as_ref().map(|f| {
            let pairs = f.size * (f.size - 1) / 2;
            f.distinct() as f64 / pairs as f64
        })
    }

    /// `(internal, external, cut)` edge counts with multiplicity.
    pub fn class_counts(&self) -> Option<(usize, usize, usize)> {
        self.focus
            .as_ref()
            .map(|f| (f.internal, self.edges.len() - f.internal - f.cut, f.cut))
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q < 2 {
            return Err(Error::invalid(format!("q must be at least 2, got {q}")));
        }
        if q > self.edges.len() {
            return Err(Error::invalid(format!(
                "q = {q} exceeds edge count {}",
                self.edges.len()
            )));
        }
        Ok(())
    }

    fn remove_random(&mut self, q: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
        let mut picks = index::sample(rng, self.edges.len(), q).into_vec();
        picks.sort_unstable_by(|a, b| b.cmp(a));
        let mut removed = Vec::with_capacity(q);
        // Descending swap_remove only ever moves elements that are not picked.
        for i in picks {
            let e = self.edges.swap_remove(i);
            if let Some(f) = self.focus.as_mut() {
                f.remove(e);
            }
            removed.push(e);
        }
        removed
    }

    fn push_edges(&mut self, added: &[Edge]) {
        self.edges.extend_from_slice(added);
        if let Some(f) = self.focus.as_mut() {
            for &e in added {
                f.add(e);
            }
        }
    }

    fn record(&mut self, removed: Vec<Edge>, added: Vec<Edge>, case: StepCase) -> &StepRecord {
        self.tick += 1;
        self.log.push(StepRecord {
            tick: self.tick,
            removed,
            added,
            case,
        });
        self.log.last().expect("just pushed")
    }

    pub fn step_uniform(&mut self, q: usize, rng: &mut ChaCha8Rng) -> Result<&StepRecord> {
        self.check_q(q)?;
        let removed = self.remove_random(q, rng);
        let mut stubs: Vec<NodeId> = removed.iter().flat_map(|e| [e.u, e.v]).collect();
        let mut added = Vec::with_capacity(q);
        match_stubs(&mut stubs, rng, &mut added);
        self.push_edges(&added);
        Ok(self.record(removed, added, StepCase::Uniform))
    }

    pub fn step_concentrated(&mut self, gamma: f64, q: usize, rng: &mut ChaCha8Rng) -> Result<&StepRecord> {
        self.check_q(q)?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        let focus = self
            .focus
            .as_ref()
            .ok_or_else(|| Error::invalid("concentrated step on a chain without a focus set"))?;
        if focus.size < 2 {
            return Err(Error::invalid("focus set needs at least 2 nodes"));
        }
        let target = focus.target(gamma);
        let distinct_before = focus.distinct();
        let satisfied = distinct_before >= target;

        let removed = self.remove_random(q, rng);
        let focus = self.focus.as_ref().expect("checked above");
        let mut internal: Vec<Edge> = Vec::new();
        let mut external: Vec<NodeId> = Vec::new();
        let mut cut_in: Vec<NodeId> = Vec::new();
        let mut cut_out: Vec<NodeId> = Vec::new();
        for &e in &removed {
            match (focus.contains(e.u), focus.contains(e.v)) {
                (true, true) => internal.push(e),
                (false, false) => external.extend([e.u, e.v]),
                (true, false) => {
                    cut_in.push(e.u);
                    cut_out.push(e.v);
                }
                (false, true) => {
                    cut_in.push(e.v);
                    cut_out.push(e.u);
                }
            }
        }
        let mut internal_stubs: Vec<NodeId> = internal.iter().flat_map(|e| [e.u, e.v]).collect();
        cut_in.shuffle(rng);
        cut_out.shuffle(rng);

        let (converted, case) = if satisfied {
            (0, None)
        } else {
            let deficit = target - distinct_before;
            let half = cut_in.len() / 2;
            if deficit <= half {
                (deficit, Some(StepCase::ConvertPartial { converted: deficit }))
            } else {
                (half, Some(StepCase::ConvertAll { converted: half }))
            }
        };
        // Each conversion turns two cut edges into one internal and one external edge.
        internal_stubs.extend(cut_in.drain(..2 * converted));
        external.extend(cut_out.drain(..2 * converted));

        let mut added = Vec::with_capacity(q);
        match_stubs(&mut internal_stubs, rng, &mut added);
        let case = match case {
            Some(c) => {
                self.push_edges(&added);
                c
            }
            None => {
                let before = self.edges.len();
                self.push_edges(&added);
                let restore = self.focus.as_ref().expect("focus").distinct() < target;
                if restore {
                    while self.edges.len() > before {
                        let e = self.edges.pop().expect("proposed edge");
                        self.focus.as_mut().expect("focus").remove(e);
                    }
                    added.clear();
                    added.extend_from_slice(&internal);
                    self.push_edges(&internal);
                }
                StepCase::Maintain {
                    internal_restored: restore,
                }
            }
        };
        let mark = added.len();
        match_stubs(&mut external, rng, &mut added);
        added.extend(cut_in.iter().zip(&cut_out).map(|(&a, &b)| Edge::new(a, b)));
        let tail = added[mark..].to_vec();
        self.push_edges(&tail);
        Ok(self.record(removed, added, case))
    }
}

/// Ticks `[start_tick, start_tick + steps)` belong to one phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpan {
    pub mode: Mode,
    pub start_tick: u64,
    pub steps: u64,
}

impl PhaseSpan {
    pub fn contains(&self, tick: u64) -> bool {
        tick >= self.start_tick && tick < self.start_tick + self.steps
    }
}

#[derive(Clone, Debug)]
pub struct ScheduleRun {
    /// Initial edges at tick 0, then every added edge at its step's tick.
    /// Self-loops are not emitted.
    pub stream: Vec<TimestampedEdge>,
    /// Removed edges per step, indexed by `tick - 1`.
    pub removals: Vec<Vec<Edge>>,
    pub cases: Vec<StepCase>,
    pub phases: Vec<PhaseSpan>,
    pub final_graph: MultiGraph,
}

impl ScheduleRun {
    /// Writes the stream in edge-file format with a `# phase=<mode> step=<i>`
    /// line before the first edge of each phase.
    pub fn write_annotated<W: Write>(&self, mut w: W, n: usize) -> Result<()> {
        writeln!(w, "# n={n}")?;
        let mut phases = self.phases.iter().filter(|p| p.steps > 0).peekable();
        for e in &self.stream {
            while let Some(p) = phases.peek() {
                if e.ts < p.start_tick {
                    break;
                }
                writeln!(w, "# phase={} step={}", p.mode.label(), p.start_tick)?;
                phases.next();
            }
            writeln!(w, "{} {} {}", e.u, e.v, e.ts)?;
        }
        for p in phases {
            writeln!(w, "# phase={} step={}", p.mode.label(), p.start_tick)?;
        }
        Ok(())
    }
}

pub fn run_schedule(initial: &MultiGraph, cfg: &DynamicsConfig, seed: u64) -> Result<ScheduleRun> {
    cfg.validate()?;
    let needs_focus = cfg.schedule.iter().any(|(m, _)| matches!(m, Mode::Concentrated { .. }));
    let mut st = if needs_focus {
        ChainState::with_focus(initial.clone(), &cfg.focus)?
    } else {
        ChainState::new(initial.clone())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stream: Vec<TimestampedEdge> = initial
        .edges()
        .iter()
        .filter(|e| !e.is_loop())
        .map(|e| TimestampedEdge::new(e.u, e.v, 0))
        .collect();
    let total = cfg.total_steps() as usize;
    let mut removals = Vec::with_capacity(total);
    let mut cases = Vec::with_capacity(total);
    let mut phases = Vec::with_capacity(cfg.schedule.len());
    for &(mode, steps) in &cfg.schedule {
        phases.push(PhaseSpan {
            mode,
            start_tick: st.tick() + 1,
            steps,
        });
        for _ in 0..steps {
            let rec = match mode {
                Mode::Uniform => st.step_uniform(cfg.q, &mut rng)?,
                Mode::Concentrated { gamma } => st.step_concentrated(gamma, cfg.q, &mut rng)?,
            };
            let tick = rec.tick;
            cases.push(rec.case);
            stream.extend(
                rec.added
                    .iter()
                    .filter(|e| !e.is_loop())
                    .map(|e| TimestampedEdge::new(e.u, e.v, tick)),
            );
            let rec = st.take_log().pop().expect("one record per step");
            removals.push(rec.removed);
        }
    }
    log::debug!(
        "schedule finished after {} steps, {} stream edges",
        st.tick(),
        stream.len()
    );
    Ok(ScheduleRun {
        stream,
        removals,
        cases,
        phases,
        final_graph: st.graph(),
    })
}

/// Canonical key of a labeled multigraph: its normalized edges, sorted.
pub type StateKey = Vec<Edge>;

pub fn state_key(edges: &[Edge]) -> StateKey {
    let mut k: Vec<Edge> = edges.iter().map(|e| e.normalized()).collect();
    k.sort_unstable();
    k
}

/// Visit counts of a uniform chain over all multigraphs with a given
/// degree sequence, next to the matching-count weight of each multigraph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityTable {
    pub states: Vec<StateKey>,
    /// Number of stub matchings producing each state.
    pub matchings: Vec<u64>,
    /// Visits after every step, summed over trials.
    pub visits: Vec<u64>,
}

impl StationarityTable {
    /// Probabilities implied by a uniform law over stub matchings.
    pub fn expected(&self) -> Vec<f64> {
        let total: u64 = self.matchings.iter().sum();
        self.matchings.iter().map(|&m| m as f64 / total as f64).collect()
    }
}

const MAX_STATES: usize = 10_000;
const MAX_MATCHINGS: u64 = 2_000_000;

fn enumerate_states(stubs: &[NodeId]) -> BTreeMap<StateKey, u64> {
    fn rec(rest: &mut Vec<NodeId>, acc: &mut Vec<Edge>, out: &mut BTreeMap<StateKey, u64>) {
        if rest.is_empty() {
            *out.entry(state_key(acc)).or_default() += 1;
            return;
        }
        let first = rest.remove(0);
        for i in 0..rest.len() {
            let partner = rest.remove(i);
            acc.push(Edge::new(first, partner));
            rec(rest, acc, out);
            acc.pop();
            rest.insert(i, partner);
        }
        rest.insert(0, first);
    }
    let mut out = BTreeMap::new();
    rec(&mut stubs.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Runs `trials` independent uniform chains of `steps` steps and tallies the
/// state after every step. Errors when the state space is not enumerable.
pub fn stationarity_probe(
    degrees: &[u32],
    q: usize,
    steps: u64,
    trials: usize,
    seed: u64,
) -> Result<StationarityTable> {
    let stubs: Vec<NodeId> = degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v as NodeId, d as usize))
        .collect();
    if stubs.is_empty() || !stubs.len().is_multiple_of(2) {
        return Err(Error::invalid("degree sum must be positive and even"));
    }
    if q < 2 || q > stubs.len() / 2 {
        return Err(Error::invalid(format!("q = {q} must lie in [2, {}]", stubs.len() / 2)));
    }
    let matchings: u64 = (1..stubs.len() as u64)
        .step_by(2)
        .try_fold(1u64, |acc, k| acc.checked_mul(k))
        .unwrap_or(u64::MAX);
    if matchings > MAX_MATCHINGS {
        return Err(Error::invalid(format!(
            "{matchings} stub matchings is too many to enumerate"
        )));
    }
    let table = enumerate_states(&stubs);
    if table.len() > MAX_STATES {
        return Err(Error::invalid(format!(
            "{} states exceeds the limit of {MAX_STATES}",
            table.len()
        )));
    }
    let index: HashMap<&StateKey, usize> = table.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let mut visits = vec![0u64; table.len()];
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut start = stubs.clone();
        let mut edges = Vec::new();
        match_stubs(&mut start, &mut rng, &mut edges);
        let mut st = ChainState::new(MultiGraph::from_parts(degrees.len(), edges));
        for _ in 0..steps {
            st.step_uniform(q, &mut rng)?;
            st.log.clear();
            let key = state_key(st.edges());
            let i = *index
                .get(&key)
                .ok_or_else(|| Error::Internal("chain left the enumerated state space".into()))?;
            visits[i] += 1;
        }
    }
    let (states, matchings) = table.into_iter().unzip();
    Ok(StationarityTable {
        states,
        matchings,
        visits,
    })
}
