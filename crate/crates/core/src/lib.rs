//! Subgraph homomorphism: exact search, dual-simulation filtering, and a
//! learned verifier that screens pivot candidates.

pub mod bench;
pub mod datagen;
pub mod dualsim;
pub mod exact;
pub mod fixtures;
pub mod graph;
pub mod hgin;
pub mod io;
pub mod pipeline;

pub use graph::{Graph, GraphBuilder, Label, LabelDict, VertexId};
