//! Clustering of partially observed graphs by convex sparse plus low-rank
//! splitting.
//!
//! The adjacency matrix plus identity, `I + A`, of an ideally clustered
//! graph is block-diagonal with all-ones blocks. For a noisy, partially
//! observed graph we split the observed entries into a low-rank part `K`
//! and a sparse part `B` by minimizing `eta ||B||_1 + (1 - eta) ||K||_*`.
//! Whenever the optimal `K` is a valid clustering matrix, that clustering
//! minimizes the number of observed disagreements; otherwise the
//! [`pipeline`] reports failure instead of a suboptimal answer.
//!
//! Modules:
//! - [`graph`], [`clustering`], [`validity`]: data model, file formats,
//!   disagreement counting and the validity test.
//! - [`matops`]: symmetric SVD, thresholding, norms and projections.
//! - [`splitter`]: the inexact augmented Lagrangian solver.
//! - [`pipeline`]: the eta line search that either certifies or fails.
//! - [`certificate`]: recovery conditions and dual certificates.
//! - [`genbench`]: planted-partition generator, exhaustive oracle and
//!   success-rate sweeps.

pub mod certificate;
pub mod clustering;
pub mod error;
pub mod genbench;
pub mod graph;
pub mod matops;
pub mod matrix;
pub mod pipeline;
pub mod splitter;
pub mod tolerances;
pub mod validity;

pub use clustering::Clustering;
pub use error::{Error, Result};
pub use graph::{ObservedPair, PartialGraph};
pub use matrix::SymMatrix;
pub use tolerances::Tolerances;
