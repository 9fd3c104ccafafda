//! Depth histograms, the per-point cut-off search, and the three neighbor functions.
//!
//! For a point `x_i` the depth row `D[i][.]` is binned into `n_bins` right-closed
//! bins over `(0, 1]`. Scanning from the center-most bins outward, the first
//! strict local minimum of the counts marks where the local density drops; its
//! left edge is the cut-off `h_opt(i)` and every point strictly deeper than the
//! cut-off is a neighbor.

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};

/// Histogram resolution and the number of flanking bins a minimum must beat on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NeighborParams {
    n_bins: usize,
    step_size: usize,
}

impl NeighborParams {
    pub fn new(n_bins: usize, step_size: usize) -> Result<Self> {
        if step_size < 1 {
            return Err(Error::InvalidParameter("step size must be >= 1".into()));
        }
        if n_bins < 2 * step_size + 2 {
            return Err(Error::InvalidParameter(format!(
                "n_bins = {n_bins} must be >= 2 * step_size + 2 = {}",
                2 * step_size + 2
            )));
        }
        Ok(Self { n_bins, step_size })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn step_size(&self) -> usize {
        self.step_size
    }
}

/// What a point's neighbor set becomes when its histogram has no strict local minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    /// Cut-off 0: every observation is a neighbor.
    #[default]
    AllPoints,
    /// Only the point itself.
    SelfOnly,
}

/// Counts of depths per bin; `counts()[j - 1]` holds bin `j`, covering `((j-1)/n_bins, j/n_bins]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthHistogram {
    counts: Vec<usize>,
}

impl DepthHistogram {
    pub fn from_counts(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        1.0 / self.counts.len() as f64
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Count of bin `j` (1-based, `j = n_bins` is the center-most bin).
    pub fn bin(&self, j: usize) -> usize {
        self.counts[j - 1]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// 1-based bin of a depth: `ceil(depth * n_bins)` clamped to `[1, n_bins]`.
#[inline]
pub fn bin_index(depth: f64, n_bins: usize) -> usize {
    ((depth * n_bins as f64).ceil() as usize).clamp(1, n_bins)
}

pub fn build_histogram(depth_row: &[f64], n_bins: usize) -> Result<DepthHistogram> {
    if n_bins == 0 {
        return Err(Error::InvalidParameter("n_bins must be >= 1".into()));
    }
    if let Some(&d) = depth_row.iter().find(|&&d| !(d > 0.0 && d <= 1.0)) {
        return Err(Error::DepthOutOfRange(d));
    }
    Ok(histogram_unchecked(depth_row, n_bins))
}

fn histogram_unchecked(depth_row: &[f64], n_bins: usize) -> DepthHistogram {
    let mut counts = vec![0; n_bins];
    for &d in depth_row {
        counts[bin_index(d, n_bins) - 1] += 1;
    }
    DepthHistogram { counts }
}

/// First bin `j`, scanning `n_bins - step` down to `1 + step`, whose count is strictly
/// below every bin within `step` on either side.
pub fn first_local_minimum(hist: &DepthHistogram, step_size: usize) -> Option<usize> {
    let n_bins = hist.n_bins();
    if step_size == 0 || n_bins < 2 * step_size + 1 {
        return None;
    }
    let h = |j: usize| hist.bin(j);
    (1 + step_size..=n_bins - step_size)
        .rev()
        .find(|&j| (1..=step_size).all(|z| h(j) < h(j + z) && h(j) < h(j - z)))
}

/// Depth cut-off `h_opt = (j - 1) / n_bins` at the first strict local minimum, or `0`
/// when none exists.
pub fn find_hopt(hist: &DepthHistogram, step_size: usize) -> f64 {
    first_local_minimum(hist, step_size)
        .map(|j| (j - 1) as f64 / hist.n_bins() as f64)
        .unwrap_or(0.0)
}

/// Neighbors of a point from its depth row: `{l : depth_row[l] > h_opt}`.
pub fn nbr_crad(depth_row: &[f64], params: NeighborParams) -> Vec<usize> {
    let hist = histogram_unchecked(depth_row, params.n_bins);
    let cutoff = find_hopt(&hist, params.step_size);
    above(depth_row, cutoff)
}

/// [`nbr_crad`] for row `i` of a depth matrix, with an explicit no-minimum policy.
pub fn nbr_crad_point(
    depth_row: &[f64],
    i: usize,
    params: NeighborParams,
    fallback: Fallback,
) -> Vec<usize> {
    let hist = histogram_unchecked(depth_row, params.n_bins);
    match first_local_minimum(&hist, params.step_size) {
        Some(j) => above(depth_row, (j - 1) as f64 / params.n_bins as f64),
        None => match fallback {
            Fallback::AllPoints => (0..depth_row.len()).collect(),
            Fallback::SelfOnly => vec![i],
        },
    }
}

fn above(depth_row: &[f64], cutoff: f64) -> Vec<usize> {
    depth_row
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > cutoff)
        .map(|(l, _)| l)
        .collect()
}

/// Global depth threshold: `{l : depth_row[l] >= theta}`.
pub fn nbr_dbca(depth_row: &[f64], theta: f64) -> Vec<usize> {
    depth_row
        .iter()
        .enumerate()
        .filter(|(_, &d)| d >= theta)
        .map(|(l, _)| l)
        .collect()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean ball: `{j : ||x_i - x_j|| <= epsilon}`.
pub fn nbr_euclid(x: &DataMatrix, i: usize, epsilon: f64) -> Vec<usize> {
    let xi = x.row(i);
    x.rows()
        .enumerate()
        .filter(|(_, xj)| euclidean(xi, xj) <= epsilon)
        .map(|(j, _)| j)
        .collect()
}
