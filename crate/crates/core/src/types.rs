// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

pub type NodeId = u32;

/// An undirected edge. Endpoint order is whatever the producer emitted; use
/// [`Edge::normalized`] when comparing edges as unordered pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
}

impl Edge {
    pub fn new(u: NodeId, v: NodeId) -> Self {
        Edge { u, v }
    }

    pub fn normalized(self) -> Self {
        if self.u <= self.v {
            self
        } else {
            Edge { u: self.v, v: self.u }
        }
    }

    pub fn is_loop(self) -> bool {
        self.u == self.v
    }
}

impl From<(NodeId, NodeId)> for Edge {
    fn from((u, v): (NodeId, NodeId)) -> Self {
        Edge { u, v }
    }
}
