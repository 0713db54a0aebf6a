// SPDX-License-Identifier: Apache-2.0

//! Edge streams: timestamped edges, uniform reservoirs, per-window
//! reservoirs and the text edge-file format.

mod edge_file;
mod reservoir;
mod window;

pub use edge_file::{parse_edge_file, read_edge_file, write_edge_stream, EdgeReader, ParsedStream};
pub use reservoir::Reservoir;
pub use window::{window_reservoirs, WindowConfig, WindowSampler};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_gen::MultiGraph;
use crate::types::{Edge, NodeId};

/// An edge with an integer timestamp (abstract ticks).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimestampedEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub ts: u64,
}

impl TimestampedEdge {
    pub fn new(u: NodeId, v: NodeId, ts: u64) -> Self {
        TimestampedEdge { u, v, ts }
    }

    pub fn edge(&self) -> Edge {
        Edge::new(self.u, self.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamOrder {
    AsStored,
    Shuffled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimestampMode {
    /// 0, 1, 2, ... in emission order.
    UnitSpaced,
    /// One timestamp per emitted edge, used verbatim.
    Explicit(Vec<u64>),
}

/// Emits each distinct non-loop edge of `g` once.
pub fn stream_from_graph(
    g: &MultiGraph,
    order: StreamOrder,
    timestamps: TimestampMode,
) -> Result<Vec<TimestampedEdge>> {
    let mut edges = g.distinct_edges();
    if let StreamOrder::Shuffled(seed) = order {
        edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    match timestamps {
        TimestampMode::UnitSpaced => Ok(edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| TimestampedEdge::new(e.u, e.v, i as u64))
            .collect()),
        TimestampMode::Explicit(ts) => {
            if ts.len() != edges.len() {
                return Err(Error::invalid(format!(
                    "{} timestamps for {} distinct edges",
                    ts.len(),
                    edges.len()
                )));
            }
            Ok(edges
                .into_iter()
                .zip(ts)
                .map(|(e, t)| TimestampedEdge::new(e.u, e.v, t))
                .collect())
        }
    }
}
