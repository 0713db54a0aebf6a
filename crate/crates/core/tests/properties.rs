// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use dense_stream::degree_model::{erdos_gallai_feasible, zipf_sequence};
use dense_stream::detector::{detect_edges, reconstruct_edges};
use dense_stream::dynamics::ChainState;
use dense_stream::graph_gen::{configuration_model, MultiGraph};
use dense_stream::sketch::{connected_components, reservoir_degree_stats, two_core};
use dense_stream::stream::{window_reservoirs, Reservoir, TimestampedEdge, WindowConfig};
use dense_stream::{Edge, NodeId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn edge_list(max_node: NodeId, max_len: usize) -> impl Strategy<Value = Vec<Edge>> {
    prop::collection::vec(
        (0..max_node, 0..max_node).prop_map(|(u, v)| Edge::new(u, v)),
        0..max_len,
    )
}

/// Brute-force Erdős–Gallai over every prefix length.
fn erdos_gallai_naive(degrees: &[u64]) -> bool {
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    if d.iter().sum::<u64>() % 2 != 0 {
        return false;
    }
    (1..=d.len()).all(|k| {
        let lhs: u64 = d[..k].iter().sum();
        let rhs = (k * (k - 1)) as u64 + d[k..].iter().map(|&x| x.min(k as u64)).sum::<u64>();
        lhs <= rhs
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zipf_sequences_are_feasible(n in 10u64..1_000_000) {
        let seq = zipf_sequence(n).unwrap();
        prop_assert_eq!(seq.n(), n);
        prop_assert_eq!(seq.degree_sum() % 2, 0);
        let degrees: Vec<u64> = seq.degrees().into_iter().map(u64::from).collect();
        prop_assert!(erdos_gallai_feasible(&degrees));
    }

    #[test]
    fn erdos_gallai_matches_naive(d in prop::collection::vec(0u64..8, 0..10)) {
        prop_assert_eq!(erdos_gallai_feasible(&d), erdos_gallai_naive(&d));
    }

    #[test]
    fn reservoir_is_a_bounded_subset(edges in edge_list(30, 200), k in 1usize..40, seed in any::<u64>()) {
        let stream: Vec<TimestampedEdge> =
            edges.iter().enumerate().map(|(i, e)| TimestampedEdge::new(e.u, e.v, i as u64)).collect();
        let mut r = Reservoir::new(k, seed);
        r.extend(stream.iter().copied());
        let non_loops = stream.iter().filter(|e| e.u != e.v).count();
        prop_assert_eq!(r.seen(), non_loops as u64);
        prop_assert_eq!(r.len(), k.min(non_loops));
        let ts: BTreeSet<u64> = r.samples().iter().map(|e| e.ts).collect();
        prop_assert_eq!(ts.len(), r.len());
        for s in r.samples() {
            prop_assert_eq!(stream[s.ts as usize], *s);
        }
    }

    #[test]
    fn components_partition_and_ignore_order(edges in edge_list(40, 60), seed in any::<u64>()) {
        let a = connected_components(&edges);
        let mut shuffled = edges.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        let flipped: Vec<Edge> = shuffled.iter().map(|e| Edge::new(e.v, e.u)).collect();
        prop_assert_eq!(&a, &connected_components(&flipped));
        let spanned: BTreeSet<NodeId> = edges.iter().filter(|e| e.u != e.v).flat_map(|e| [e.u, e.v]).collect();
        let covered: Vec<NodeId> = a.components.iter().flatten().copied().collect();
        prop_assert_eq!(covered.len(), spanned.len());
        prop_assert_eq!(covered.into_iter().collect::<BTreeSet<_>>(), spanned);
    }

    #[test]
    fn two_core_is_idempotent_and_well_formed(edges in edge_list(30, 60)) {
        let nodes: Vec<NodeId> = (0..30).collect();
        let core = two_core(&nodes, &edges);
        prop_assert_eq!(two_core(&core, &edges), core.clone());
        let members: BTreeSet<NodeId> = core.iter().copied().collect();
        for &v in &core {
            let nbrs: BTreeSet<NodeId> = edges
                .iter()
                .filter(|e| e.u != e.v)
                .filter_map(|e| if e.u == v { Some(e.v) } else if e.v == v { Some(e.u) } else { None })
                .filter(|w| members.contains(w))
                .collect();
            prop_assert!(nbrs.len() >= 2, "node {} has {} core neighbours", v, nbrs.len());
        }
    }

    #[test]
    fn two_core_ignores_edge_order(edges in edge_list(25, 50), seed in any::<u64>()) {
        let nodes: Vec<NodeId> = (0..25).collect();
        let mut shuffled = edges.clone();
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(two_core(&nodes, &edges), two_core(&nodes, &shuffled));
    }

    #[test]
    fn detection_is_monotone(edges in edge_list(40, 60), extra in edge_list(40, 20), t in 1usize..20) {
        let mut more = edges.clone();
        more.extend(extra);
        if detect_edges(&edges, t).accept {
            prop_assert!(detect_edges(&more, t).accept);
        }
    }

    #[test]
    fn reconstruction_lies_in_largest_component(edges in edge_list(30, 60), t in 1usize..10) {
        if let Some(nodes) = reconstruct_edges(&edges, t) {
            let summary = connected_components(&edges);
            let largest: BTreeSet<NodeId> = summary.largest().iter().copied().collect();
            prop_assert!(nodes.iter().all(|v| largest.contains(v)));
        }
    }

    #[test]
    fn q_stat_matches_definition(edges in edge_list(20, 40)) {
        let s = reservoir_degree_stats(&edges);
        let mut deg = std::collections::BTreeMap::<NodeId, i64>::new();
        for e in edges.iter().filter(|e| e.u != e.v) {
            *deg.entry(e.u).or_default() += 1;
            *deg.entry(e.v).or_default() += 1;
        }
        prop_assert_eq!(s.n_r, deg.len() as u64);
        if !deg.is_empty() {
            let num: i64 = deg.values().map(|&d| d * (d - 2)).sum();
            prop_assert!((s.q_stat - num as f64 / deg.len() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn window_reservoirs_hold_only_their_interval(
        gaps in prop::collection::vec(0u64..4, 1..120),
        stride in 1u64..4,
        lambda in 1u64..5,
        k in 1usize..200,
    ) {
        let cfg = WindowConfig::new(lambda * (stride + 1), lambda).unwrap();
        let mut ts = 0u64;
        let stream: Vec<TimestampedEdge> = gaps
            .iter()
            .enumerate()
            .map(|(i, g)| {
                ts += g;
                TimestampedEdge::new(i as NodeId, i as NodeId + 1, ts)
            })
            .collect();
        let windows = window_reservoirs(stream.iter().copied(), cfg, k, 7).unwrap();
        let indices: Vec<usize> = windows.iter().map(|(i, _)| *i).collect();
        prop_assert_eq!(indices, (1..=windows.len()).collect::<Vec<_>>());
        for (i, r) in &windows {
            let inside = stream.iter().filter(|e| e.ts >= cfg.start(*i) && e.ts <= cfg.end(*i)).count();
            prop_assert_eq!(r.seen(), inside as u64);
            prop_assert!(r.samples().iter().all(|e| e.ts >= cfg.start(*i) && e.ts <= cfg.end(*i)));
        }
    }

    #[test]
    fn chain_steps_preserve_degrees(seed in any::<u64>(), q in 2usize..30, steps in 1usize..50) {
        let seq = zipf_sequence(500).unwrap();
        let g = configuration_model(&seq, false, seed).unwrap();
        let want = g.degrees();
        let mut st = ChainState::new(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..steps {
            st.step_uniform(q, &mut rng).unwrap();
        }
        prop_assert_eq!(st.degrees(), want);
    }

    #[test]
    fn graph_text_round_trip(edges in edge_list(15, 30)) {
        let g = MultiGraph::new(15, edges).unwrap();
        let back = MultiGraph::from_text(g.to_text().as_bytes()).unwrap();
        prop_assert_eq!(back, g);
    }
}
