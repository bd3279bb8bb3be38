//! Non-backtracking spectra and the spectral detection pipeline.

pub mod dense;
pub mod detect;
pub mod embed;
pub mod kmeans;
pub mod krylov;
pub mod operator;
pub mod overlap;

pub use dense::{dense_spectrum, dense_symmetric_spectrum, to_dense, DEFAULT_DENSE_CAP};
pub use detect::{adjacency_detect, detect, DetectOptions, Detection, OperatorChoice};
pub use embed::{embed, Embedding};
pub use kmeans::{cluster, Clustering};
pub use krylov::{
    leading_spectrum, leading_spectrum_partial, EigenPair, KrylovOptions, OperatorSource, SpectralResult,
    StopRule,
};
pub use operator::{build_nb, build_nb_reduced, trace_moment, LinearOperator, NbOperator, ReducedNbOperator};
pub use overlap::{best_agreement, overlap};
