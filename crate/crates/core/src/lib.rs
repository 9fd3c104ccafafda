//! Density-based clustering on robust Mahalanobis depth.
//!
//! The pipeline estimates one reweighted MCD scatter for the data, turns it into
//! a pairwise depth matrix, derives a neighbor set per point from a histogram of
//! its depth row, and grows clusters breadth-first over those neighbor sets.
//! Baselines (global depth threshold, Euclidean DBSCAN), validity metrics,
//! a CH-driven parameter sweep and seeded synthetic data are included.

pub mod cluster;
pub mod dataset;
pub mod depth;
pub mod error;
pub mod metrics;
pub mod neighbor;
pub mod robust_scatter;
pub mod synthgen;
pub mod tuning;

pub use cluster::{crad, crad_dbscan, dbca, dbscan_eu, AssignMode, DepthOptions};
pub use dataset::{DataMatrix, Labels, NOISE};
pub use depth::DepthMatrix;
pub use error::{Error, Result};
pub use neighbor::{Fallback, NeighborParams};
pub use robust_scatter::{robust_scatter, ScatterEstimate, ScatterOptions};
pub use tuning::{sweep_nbin, SweepAlgorithm, SweepResult};
