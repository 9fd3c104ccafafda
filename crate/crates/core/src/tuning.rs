//! Calinski-Harabasz driven selection of the histogram parameters.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cluster::{crad_dbscan_from_depth, crad_from_depth, depth_model, DepthOptions};
use crate::dataset::{DataMatrix, Labels};
use crate::depth::DepthMatrix;
use crate::error::{Error, Result};
use crate::metrics::calinski_harabasz;
use crate::neighbor::NeighborParams;

/// Which histogram-based pipeline a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAlgorithm {
    Crad,
    CradDbscan { min_pts: usize },
}

impl SweepAlgorithm {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAlgorithm::Crad => "crad",
            SweepAlgorithm::CradDbscan { .. } => "crad-dbscan",
        }
    }

    pub fn run(
        &self,
        depth: &DepthMatrix,
        params: NeighborParams,
        options: &DepthOptions,
    ) -> Labels {
        match *self {
            SweepAlgorithm::Crad => crad_from_depth(depth, params, options),
            SweepAlgorithm::CradDbscan { min_pts } => {
                crad_dbscan_from_depth(depth, params, min_pts, options)
            }
        }
    }
}

/// CH score of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    Finite(f64),
    /// Zero within-cluster dispersion.
    Infinite,
    /// Fewer than two clusters once noise is excluded.
    Undefined,
}

impl Score {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Score::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Score::Finite(v) => s.serialize_f64(v),
            Score::Infinite => s.serialize_str("inf"),
            Score::Undefined => s.serialize_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub n_bins: usize,
    pub step_size: usize,
}

impl From<NeighborParams> for GridPoint {
    fn from(p: NeighborParams) -> Self {
        Self {
            n_bins: p.n_bins(),
            step_size: p.step_size(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridEntry {
    pub n_bins: usize,
    pub step_size: usize,
    pub score: Score,
    pub n_clusters: usize,
    pub noise: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub algorithm: &'static str,
    pub entries: Vec<GridEntry>,
    pub best: GridPoint,
    pub best_score: f64,
    #[serde(skip)]
    pub best_labels: Labels,
}

/// `StepSize = 1`; `n_bins` runs from `max(4, round(0.2 n) - 100)` to `round(0.2 n) + 100`
/// in steps of 10, with the upper end always included.
pub fn default_grid(n: usize) -> Vec<NeighborParams> {
    let center = (0.2 * n as f64).round() as i64;
    let lo = (center - 100).max(4);
    let hi = (center + 100).max(lo);
    let mut bins: Vec<i64> = (lo..=hi).step_by(10).collect();
    if bins.last() != Some(&hi) {
        bins.push(hi);
    }
    bins.into_iter()
        .map(|b| NeighborParams::new(b as usize, 1).expect("n_bins >= 4"))
        .collect()
}

/// Runs `algorithm` at every grid point and keeps the labeling with the largest finite CH score.
///
/// The scatter and depth matrix are computed once and shared by all grid points.
pub fn sweep_nbin(
    x: &DataMatrix,
    algorithm: SweepAlgorithm,
    grid: &[NeighborParams],
    seed: u64,
    options: &DepthOptions,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let depth = depth_model(x, seed, &options.scatter)?;
    sweep_depth(x, &depth, algorithm, grid, options)
}

/// [`sweep_nbin`] over a precomputed depth matrix.
pub fn sweep_depth(
    x: &DataMatrix,
    depth: &DepthMatrix,
    algorithm: SweepAlgorithm,
    grid: &[NeighborParams],
    options: &DepthOptions,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let runs: Vec<(Labels, Score)> = grid
        .par_iter()
        .map(|&p| {
            let labels = algorithm.run(depth, p, options);
            let score = match calinski_harabasz(x, &labels) {
                Ok(v) if v.is_finite() => Score::Finite(v),
                Ok(_) => Score::Infinite,
                Err(_) => Score::Undefined,
            };
            (labels, score)
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (idx, (_, score)) in runs.iter().enumerate() {
        let Some(v) = score.finite() else { continue };
        let better = match best {
            None => true,
            Some((b, bv)) => v > bv || (v == bv && grid[idx] < grid[b]),
        };
        if better {
            best = Some((idx, v));
        }
    }
    let (best_idx, best_score) = best.ok_or(Error::NoValidClustering)?;

    let entries = grid
        .iter()
        .zip(&runs)
        .map(|(p, (labels, score))| GridEntry {
            n_bins: p.n_bins(),
            step_size: p.step_size(),
            score: *score,
            n_clusters: labels.n_clusters(),
            noise: labels.noise_count(),
        })
        .collect();
    let best_labels = runs.into_iter().nth(best_idx).expect("index in range").0;
    Ok(SweepResult {
        algorithm: algorithm.name(),
        entries,
        best: grid[best_idx].into(),
        best_score,
        best_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_small_n() {
        let g = default_grid(150);
        let bins: Vec<usize> = g.iter().map(|p| p.n_bins()).collect();
        assert_eq!(bins.first(), Some(&4));
        assert_eq!(bins.last(), Some(&130));
        assert!(bins.windows(2).all(|w| w[1] > w[0]));
        assert!(g.iter().all(|p| p.step_size() == 1));
    }

    #[test]
    fn default_grid_large_n() {
        let bins: Vec<usize> = default_grid(1000).iter().map(|p| p.n_bins()).collect();
        assert_eq!(bins, (100..=300).step_by(10).collect::<Vec<_>>());
    }
}
