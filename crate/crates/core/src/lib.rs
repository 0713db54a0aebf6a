// SPDX-License-Identifier: Apache-2.0

//! Streaming detection and approximate reconstruction of large very dense
//! subgraphs (γ-cliques) from a uniform reservoir of edges.
//!
//! The crate is organised bottom-up:
//!
//! - [`degree_model`]: the d⁻² Zipf degree sequence and its statistics.
//! - [`graph_gen`]: configuration model, concentrated (planted γ-clique)
//!   model and Erdős–Rényi graphs.
//! - [`stream`]: timestamped edge streams, reservoirs, sliding windows and
//!   the edge-file format.
//! - [`sketch`]: components, 2-core and degree statistics of a sample.
//! - [`detector`]: static and windowed detection / reconstruction.
//! - [`dynamics`]: degree-preserving rewiring chains that produce dynamic
//!   streams.
//! - [`harness`]: oracles, experiment runner and reports.

pub mod degree_model;
pub mod detector;
pub mod dynamics;
pub mod error;
pub mod graph_gen;
pub mod harness;
pub mod sketch;
pub mod stream;

mod types;

pub use error::{Error, Result};
pub use types::{Edge, NodeId};
