// SPDX-License-Identifier: Apache-2.0

//! Structural summaries of a sampled edge set: connected components, the
//! 2-core, and the degree histogram statistics used as reservoir diagnostics.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::types::{Edge, NodeId};

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug)]
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Components of the nodes spanned by an edge set, largest first. Each
/// component is sorted ascending; equal sizes are ordered by smallest id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub components: Vec<Vec<NodeId>>,
}

impl ComponentSummary {
    /// The largest component, or an empty slice for an empty edge set.
    pub fn largest(&self) -> &[NodeId] {
        self.components.first().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn spanned_nodes(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }
}

/// Exact components by union-find. Self-loops span nothing.
pub fn connected_components(edges: &[Edge]) -> ComponentSummary {
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    let mut nodes: Vec<NodeId> = Vec::new();
    let mut id = |v: NodeId, nodes: &mut Vec<NodeId>| {
        *index.entry(v).or_insert_with(|| {
            nodes.push(v);
            nodes.len() - 1
        })
    };
    let mut pairs = Vec::with_capacity(edges.len());
    for e in edges.iter().filter(|e| !e.is_loop()) {
        let a = id(e.u, &mut nodes);
        let b = id(e.v, &mut nodes);
        pairs.push((a, b));
    }
    let mut uf = UnionFind::new(nodes.len());
    for (a, b) in pairs {
        uf.union(a, b);
    }
    let mut groups: HashMap<usize, Vec<NodeId>> = HashMap::new();
    for (i, &v) in nodes.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(v);
    }
    let mut components: Vec<Vec<NodeId>> = groups
        .into_values()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    ComponentSummary { components }
}

/// The 2-core of the simple graph induced on `nodes`: repeatedly delete
/// nodes of degree at most 1. Parallel edges collapse and self-loops are
/// ignored. Returns the survivors sorted ascending.
pub fn two_core(nodes: &[NodeId], edges: &[Edge]) -> Vec<NodeId> {
    let members: HashSet<NodeId> = nodes.iter().copied().collect();
    let mut adjacency: HashMap<NodeId, HashSet<NodeId>> = members.iter().map(|&v| (v, HashSet::new())).collect();
    for e in edges {
        if e.is_loop() || !members.contains(&e.u) || !members.contains(&e.v) {
            continue;
        }
        adjacency.get_mut(&e.u).expect("member").insert(e.v);
        adjacency.get_mut(&e.v).expect("member").insert(e.u);
    }
    let mut degree: HashMap<NodeId, usize> = adjacency.iter().map(|(&v, n)| (v, n.len())).collect();
    let mut removed: HashSet<NodeId> = HashSet::new();
    let mut queue: Vec<NodeId> = degree.iter().filter(|(_, &d)| d <= 1).map(|(&v, _)| v).collect();
    while let Some(v) = queue.pop() {
        if !removed.insert(v) {
            continue;
        }
        for w in &adjacency[&v] {
            if removed.contains(w) {
                continue;
            }
            let d = degree.get_mut(w).expect("member");
            *d -= 1;
            if *d == 1 {
                queue.push(*w);
            }
        }
    }
    let mut core: Vec<NodeId> = members.difference(&removed).copied().collect();
    core.sort_unstable();
    core
}

/// Degree histogram of the sampled multigraph and derived statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReservoirDegreeStats {
    pub n_r: u64,
    /// `(degree, node count)` pairs in ascending degree.
    pub x: Vec<(u32, u64)>,
    pub i_star: u32,
    /// `X₁ / N_R`; 0 for an empty sample.
    pub x1_ratio: f64,
    /// `Σ i(i−2)·X_i / N_R`; 0 for an empty sample.
    pub q_stat: f64,
}

impl ReservoirDegreeStats {
    pub fn count(&self, degree: u32) -> u64 {
        self.x.iter().find(|(d, _)| *d == degree).map(|(_, c)| *c).unwrap_or(0)
    }
}

pub fn reservoir_degree_stats(edges: &[Edge]) -> ReservoirDegreeStats {
    let mut degree: HashMap<NodeId, u32> = HashMap::new();
    for e in edges.iter().filter(|e| !e.is_loop()) {
        *degree.entry(e.u).or_default() += 1;
        *degree.entry(e.v).or_default() += 1;
    }
    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    for &d in degree.values() {
        *hist.entry(d).or_default() += 1;
    }
    let n_r = degree.len() as u64;
    let i_star = hist.keys().next_back().copied().unwrap_or(0);
    // Exact integer numerator; the only rounding is the final division.
    let numerator: i128 = hist
        .iter()
        .map(|(&i, &x)| (i as i128) * (i as i128 - 2) * x as i128)
        .sum();
    let (x1_ratio, q_stat) = if n_r == 0 {
        (0.0, 0.0)
    } else {
        let x1 = hist.get(&1).copied().unwrap_or(0);
        (x1 as f64 / n_r as f64, numerator as f64 / n_r as f64)
    };
    ReservoirDegreeStats {
        n_r,
        x: hist.into_iter().collect(),
        i_star,
        x1_ratio,
        q_stat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(pairs: &[(NodeId, NodeId)]) -> Vec<Edge> {
        pairs.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn empty_summary() {
        let s = connected_components(&[]);
        assert!(s.components.is_empty());
        assert!(s.largest().is_empty());
    }

    #[test]
    fn two_components() {
        let s = connected_components(&edges(&[(0, 1), (1, 2), (3, 4)]));
        assert_eq!(s.components, vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(s.largest().len(), 3);
    }

    #[test]
    fn ties_go_to_smallest_id() {
        let s = connected_components(&edges(&[(9, 8), (2, 7)]));
        assert_eq!(s.largest(), &[2, 7]);
    }

    #[test]
    fn triangle_with_pendant() {
        let e = edges(&[(0, 1), (1, 2), (2, 0), (2, 3)]);
        assert_eq!(two_core(&[0, 1, 2, 3], &e), vec![0, 1, 2]);
    }

    #[test]
    fn trees_have_empty_core() {
        let e = edges(&[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert!(two_core(&[0, 1, 2, 3, 4], &e).is_empty());
        assert!(two_core(&[5], &[]).is_empty());
    }

    #[test]
    fn triangles_joined_by_path_survive() {
        // Triangles {0,1,2} and {6,7,8}; path 2–3–4–5–6 of three interior nodes.
        let e = edges(&[
            (0, 1),
            (1, 2),
            (2, 0),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 8),
            (8, 6),
        ]);
        let nodes: Vec<NodeId> = (0..9).collect();
        assert_eq!(two_core(&nodes, &e), nodes);
    }

    #[test]
    fn parallel_edges_do_not_form_a_cycle() {
        let e = edges(&[(0, 1), (1, 0), (1, 1)]);
        assert!(two_core(&[0, 1], &e).is_empty());
    }

    #[test]
    fn stats_single_edge() {
        let s = reservoir_degree_stats(&edges(&[(0, 1)]));
        assert_eq!((s.n_r, s.count(1), s.i_star), (2, 2, 1));
        assert_eq!(s.x1_ratio, 1.0);
        assert_eq!(s.q_stat, -1.0);
    }

    #[test]
    fn stats_star() {
        let s = reservoir_degree_stats(&edges(&[(0, 1), (0, 2), (0, 3), (0, 4)]));
        assert_eq!((s.count(1), s.count(4), s.n_r), (4, 1, 5));
        assert!((s.q_stat - 0.8).abs() < 1e-15);
        assert_eq!(s.i_star, 4);
    }

    #[test]
    fn stats_json_shape() {
        let s = reservoir_degree_stats(&edges(&[(0, 1)]));
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["x"], serde_json::json!([[1, 2]]));
        assert_eq!(v["n_r"], 2);
    }
}
