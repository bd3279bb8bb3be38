//! Detection of planted vertex labels in sparse hypergraphs.
//!
//! The crate is organised around the hypergraph non-backtracking operator:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`hypergraph`] | hypergraphs, labels, directed-edge index, degrees, adjacency |
//! | [`model`] | kernel tensors, planted sampling, closed-form predictions |
//! | [`spectral`] | non-backtracking operators, Krylov eigensolver, embedding, k-means, overlap |
//! | [`bp`] | belief propagation and stability of the factorized fixed point |
//! | [`learn`] | kernel estimation from a labelled hypergraph |
//! | [`sweep`] | phase-transition sweeps producing CSV tables |
//! | [`io`] | plain-text file formats |
//!
//! A typical pipeline samples an instance from a kernel, runs [`spectral::detect`]
//! and scores the result with [`spectral::overlap`]:
//!
//! ```no_run
//! use hypernb::model::{hsbm_kernel, sample, GroupPrior};
//! use hypernb::spectral::{detect, overlap, DetectOptions};
//!
//! let kernel = hsbm_kernel(3, 3, 4.0, 0.14).unwrap();
//! let prior = GroupPrior::uniform(3);
//! let (graph, planted) = sample(&kernel, &prior, 3000, 7).unwrap();
//! let found = detect(&graph, &DetectOptions::default()).unwrap();
//! let q = overlap(&found.labels, &planted, &prior).unwrap();
//! println!("groups = {}, overlap = {q:.3}", found.groups);
//! ```

pub mod bp;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod learn;
pub mod model;
pub mod rng;
pub mod sparse;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use hypergraph::{DirectedEdgeIndex, Hypergraph, LabelAssignment, Violation};
pub use model::{GroupPrior, KernelTensor};
