//! Certified bounded coloring for (P2∪P4, HVN)-free graphs.
//!
//! Graphs with no induced P2∪P4 (disjoint union of an edge and a four-vertex
//! path) and no induced HVN (K5 with two edges removed at a common vertex)
//! admit proper colorings with at most ⌈4ω/3⌉ colors once the clique number
//! ω is at least 4, and that bound is attained by an explicit family of
//! graphs on 2ω² vertices. This crate implements the whole pipeline:
//!
//! - [`graph`]: the bitset graph substrate;
//! - [`formats`]: graph6 / DIMACS / edge-list I/O and structured records;
//! - [`patterns`]: forbidden-pattern detection with explicit witnesses;
//! - [`oracle`]: exact clique, chromatic, cograph and matching oracles;
//! - [`decompose`]: the multipartite-cover decomposition and its structural
//!   property checks;
//! - [`coloring`]: the constructive bounded coloring that picks the proof
//!   branch matching the instance shape;
//! - [`generators`]: named graphs, the extremal family, samplers and
//!   exhaustive enumeration;
//! - [`campaign`]: batch verification used by the CLI.

pub mod campaign;
pub mod coloring;
pub mod decompose;
pub mod formats;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod patterns;

pub use graph::{Graph, GraphBuilder, GraphError, VertexSet};
pub use oracle::{Coloring, NodeBudget};
pub use patterns::{class_violation, is_class_member, Pattern, Witness};
