//! Target graphs, their symmetry groups, and emission orderings.

mod automorphism;
pub mod counts;
mod file;
mod graph;
mod ordering;

use thiserror::Error;

pub use automorphism::{
    automorphisms, automorphisms_capped, isomorphic, AutomorphismGroup, Perm, DEFAULT_GROUP_CAP,
};
pub use counts::{orbit_count, orbit_count_core, orbit_count_encoded, orbit_count_ring};
pub use file::{parse_graph, write_graph};
pub use graph::{path, ring, shor_encode_22, truncate_leaves, CoreGraph, Graph};
pub use ordering::{lift_ordering, lift_with_mask, CanonicalOrderings, EmissionOrdering, LiftMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("{0} vertices exceeds the supported size")]
    TooLarge(usize),
    #[error("a ring needs at least 3 vertices, got {0}")]
    RingTooSmall(usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("invalid leaf map: {0}")]
    BadLeafMap(String),
    #[error("graph is already encoded")]
    AlreadyEncoded,
    #[error("graph has no leaf map")]
    NoLeafMap,
    #[error("automorphism group exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error("invalid emission ordering: {0}")]
    BadOrdering(String),
    #[error("graph document: {0}")]
    Parse(String),
}
