//! Submodular hypergraphs: p-Laplacian functionals, Cheeger machinery, and
//! two spectral clustering pipelines (SDP rounding for `𝓡₂`, inverse power
//! method for `𝓡₁`), backed by brute-force oracles at desk scale.
//!
//! A submodular hypergraph pairs every hyperedge with a normalized symmetric
//! submodular cut function and a scale `ϑ_e`, so cutting a hyperedge may cost
//! differently depending on how it is split. Boundary volumes, conductance,
//! Lovász extensions, subgradients, and the associated set-valued p-Laplacian
//! all live here, together with the rounding and descent algorithms that
//! estimate the second eigenvalue for 2-way partitioning.

pub mod dataset;
pub mod error;
pub mod hypergraph;
pub mod ipm;
pub mod laplacian;
pub mod oracle;
pub mod pipeline;
pub mod sdp;
pub mod submodular;

pub use error::{Error, Result};
pub use hypergraph::{Hyperedge, SubmodularHypergraph};
pub use submodular::{BasePoint, CutWeightFn};
