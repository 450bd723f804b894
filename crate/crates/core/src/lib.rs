//! Executable models of message-passing computation on graphs.
//!
//! This crate provides:
//! - [`graph`]: the attributed-graph data model shared by everything else,
//!   with structural metrics (diameter, girth) and subgraph encodings;
//! - [`format`]: a bit-exact text format for graphs and datasets;
//! - [`oracles`]: brute-force reference solvers used as ground truth;
//! - [`local`]: a synchronous simulator for round-based node algorithms with
//!   exact per-message bit accounting and an optional bandwidth cap;
//! - [`engine`]: an exact fixed-precision message-passing network engine and
//!   the constructions translating node algorithms to networks and back;
//! - [`lowerbound`]: generators for two-player secret-pair graph families
//!   whose structural properties encode set disjointness, with exhaustive
//!   verification sweeps;
//! - [`enumerate`]: exhaustive enumeration of small connected graphs up to
//!   isomorphism, used by the verification suites.
//!
//! Heavy sweeps are data-parallel via the `parallel` feature (on by
//! default); disabling it yields a fully sequential build with identical
//! results.

pub mod bits;
pub mod engine;
pub mod enumerate;
pub mod fixed;
pub mod format;
pub mod graph;
pub mod local;
pub mod lowerbound;
pub mod oracles;
pub mod par;

pub use fixed::{Fixed, Precision};
pub use graph::{AttrVec, AttributedGraph, NodeId, SubgraphIndicator};
