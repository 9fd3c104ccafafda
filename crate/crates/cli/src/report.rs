//! JSON run report written by `crad cluster`.

use serde::Serialize;

use crad::tuning::Score;

/// Keys serialize in declaration order.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub params: Params,
    pub dataset: Fingerprint,
    pub labels_path: String,
    pub metrics: Metrics,
    pub wall_ms: u64,
    pub seed: u64,
    pub version: &'static str,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    pub n_bins: Option<usize>,
    pub step_size: Option<usize>,
    pub min_pts: Option<usize>,
    pub theta: Option<f64>,
    pub epsilon: Option<f64>,
    pub auto: bool,
    pub standardize: bool,
    pub fallback: String,
    pub assign: String,
    pub n_starts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub path: String,
    pub n: usize,
    pub p: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub ri: Option<f64>,
    pub ami: Option<f64>,
    pub ch: Score,
    pub n_clusters: usize,
    pub noise: usize,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
