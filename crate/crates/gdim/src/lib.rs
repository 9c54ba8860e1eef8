//! Estimate the latent dimension of a random graph with cross-validated
//! eigenvalues.
//!
//! The pipeline: thin the graph's edges into a fitting half and a test half
//! ([`split`]), compute leading eigenvectors of the fitting half
//! ([`spectra`]), and score each eigenvector on the held-out half with a
//! studentized quadratic form ([`cveig`]). Components that carry no signal
//! score like standard normals, so the number of significant components
//! estimates the graph's dimension. [`model`] samples block-model graphs to
//! study the method on, and [`bench`] runs calibration and accuracy studies
//! over grids of those models.

pub mod bench;
pub mod cveig;
pub mod error;
pub mod graph;
pub mod io;
pub mod model;
pub mod seed;
pub mod spectra;
pub mod split;
pub mod stats;

pub use cveig::{
    eigcv, eigcv_modified, eigcv_rectangular, CvReport, DimensionEstimate, EigcvOptions,
    MatrixMode,
};
pub use error::Error;
pub use graph::SparseGraph;
pub use model::{EdgeLaw, GraphModel, ModelSpec, ThetaSpec};
pub use split::{multi_split, split, SplitPair};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
