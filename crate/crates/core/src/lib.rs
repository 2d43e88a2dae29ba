//! Template-function featurization of persistence diagrams.
//!
//! The crate turns finite persistence diagrams into fixed-length feature
//! vectors using two template systems (tent functions on a regular grid and
//! products of Chebyshev-node Lagrange polynomials), fits ridge regression and
//! one-vs-rest ridge classifiers on those features, and ships deterministic
//! generators for the synthetic experiments (normal diagrams, manifold point
//! clouds, Rossler time series).
//!
//! Batch-heavy entry points accept an [`ExecMode`]. With the `parallel`
//! feature (on by default) [`ExecMode::Parallel`] fans work out over rayon;
//! without it every mode runs sequentially. Results are identical either way.

pub mod datagen;
pub mod diagrams;
mod error;
pub mod exec;
pub mod experiment;
pub mod featurize;
pub mod io;
pub mod learn;
pub mod persistence;

pub use diagrams::{DiagramPoint, PersistenceDiagram, WedgeRegion};
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use featurize::{ChebMesh, FeatureMatrix, Featurizer, TentGrid};
pub use learn::RidgeModel;
pub use persistence::PointCloud;
