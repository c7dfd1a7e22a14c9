//! Diffusion-based recommendation on a user-object-tag tripartite graph.
//!
//! The library covers the full pipeline: parsing and purifying raw
//! tag-assignment records, seeded train/test splitting, sparse tripartite
//! graph construction, the three diffusion kernels (user-object,
//! user-object-tag, user-tag-object), and the evaluation metrics
//! (ranking score, inter/inner diversity, overlap ratios, tag entropy,
//! degree distributions). The `harness` module orchestrates seeded
//! multi-realization experiments and CSV report emission.

pub mod diffusion;
pub mod graph;
pub mod harness;
pub mod ingest;
pub mod metrics;
