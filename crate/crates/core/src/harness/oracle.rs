// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference answers for tiny inputs. Deliberately naive and
//! written without reuse of the production algorithms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::types::{Edge, NodeId};

pub const MAX_ORACLE_NODES: usize = 1_000;
pub const MAX_ORACLE_STUBS: usize = 12;

fn adjacency(edges: &[Edge]) -> Result<BTreeMap<NodeId, BTreeSet<NodeId>>> {
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for e in edges {
        if e.u == e.v {
            continue;
        }
        adj.entry(e.u).or_default().insert(e.v);
        adj.entry(e.v).or_default().insert(e.u);
    }
    if adj.len() > MAX_ORACLE_NODES {
        return Err(Error::invalid(format!(
            "{} nodes exceeds the oracle cap {MAX_ORACLE_NODES}",
            adj.len()
        )));
    }
    Ok(adj)
}

/// Components of the nodes spanned by non-loop edges, by breadth-first
/// search, as a set of sets.
pub fn oracle_components(edges: &[Edge]) -> Result<BTreeSet<BTreeSet<NodeId>>> {
    let adj = adjacency(edges)?;
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    let mut out = BTreeSet::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            comp.insert(v);
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        out.insert(comp);
    }
    Ok(out)
}

/// 2-core of the simple graph induced on `nodes`, by repeatedly scanning for
/// any node with at most one surviving neighbour.
pub fn oracle_two_core(nodes: &[NodeId], edges: &[Edge]) -> Result<BTreeSet<NodeId>> {
    let mut alive: BTreeSet<NodeId> = nodes.iter().copied().collect();
    if alive.len() > MAX_ORACLE_NODES {
        return Err(Error::invalid(format!(
            "{} nodes exceeds the oracle cap {MAX_ORACLE_NODES}",
            alive.len()
        )));
    }
    let adj = adjacency(edges)?;
    loop {
        let weak = alive.iter().copied().find(|v| {
            adj.get(v)
                .map_or(0, |ns| ns.iter().filter(|w| alive.contains(w)).count())
                <= 1
        });
        match weak {
            Some(v) => {
                alive.remove(&v);
            }
            None => return Ok(alive),
        }
    }
}

/// Every perfect matching of stub positions `0..stubs`, as index pairs.
pub fn oracle_matchings(stubs: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if !stubs.is_multiple_of(2) || stubs > MAX_ORACLE_STUBS {
        return Err(Error::invalid(format!(
            "need an even stub count <= {MAX_ORACLE_STUBS}, got {stubs}"
        )));
    }
    let mut out = Vec::new();
    let mut stack: Vec<(u32, Vec<(usize, usize)>)> = vec![(0, Vec::new())];
    let full: u32 = if stubs == 0 { 0 } else { (1u32 << stubs) - 1 };
    while let Some((used, pairs)) = stack.pop() {
        if used == full {
            out.push(pairs);
            continue;
        }
        let first = (!used).trailing_zeros() as usize;
        for partner in (first + 1)..stubs {
            if used & (1 << partner) == 0 {
                let mut next = pairs.clone();
                next.push((first, partner));
                stack.push((used | (1 << first) | (1 << partner), next));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_stubs_give_fifteen_matchings() {
        let m = oracle_matchings(6).unwrap();
        assert_eq!(m.len(), 15);
        assert_eq!(oracle_matchings(12).unwrap().len(), 10_395);
        assert_eq!(oracle_matchings(0).unwrap(), vec![Vec::<(usize, usize)>::new()]);
        assert!(oracle_matchings(14).is_err());
        assert!(oracle_matchings(3).is_err());
    }

    #[test]
    fn path_has_empty_core() {
        let e: Vec<Edge> = (0..5).map(|i| Edge::new(i, i + 1)).collect();
        let nodes: Vec<NodeId> = (0..6).collect();
        assert!(oracle_two_core(&nodes, &e).unwrap().is_empty());
    }

    #[test]
    fn bfs_components() {
        let e = [Edge::new(0, 1), Edge::new(2, 3), Edge::new(3, 4), Edge::new(5, 5)];
        let c = oracle_components(&e).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.contains(&BTreeSet::from([2, 3, 4])));
    }

    #[test]
    fn caps() {
        let e: Vec<Edge> = (0..1_001).map(|i| Edge::new(2 * i, 2 * i + 1)).collect();
        assert!(oracle_components(&e).is_err());
    }
}
