//! Graph Fourier transforms on Cartesian products of directed graphs.
//!
//! Two transforms are provided. [`square::SquarePlan`] takes the SVD of the
//! full product Laplacian `L1 ⊗ I + I ⊗ L2`; [`factor::FactorPlan`] combines
//! the SVDs of the two factor Laplacians and never forms an `N × N` matrix.
//! Both map a signal to a pair of spectral components, support bandlimiting
//! to the lowest frequencies, and give an error bound for it. They coincide
//! when both factors are undirected.
//!
//! [`experiments`] and [`pipeline`] run noise/denoising studies on
//! station × hour data loaded through [`dataset`].

pub mod dataset;
pub mod error;
pub mod experiments;
pub mod factor;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod signal;
pub mod spectral;
pub mod square;

pub use error::{Error, Result};
pub use factor::FactorPlan;
pub use graph::DirectedGraph;
pub use signal::ProductSignal;
pub use square::SquarePlan;
