//! Minimum Covariance Determinant estimation and reweighting.
//!
//! [`fast_mcd`] runs the randomized concentration-step search, [`exact_mcd`]
//! enumerates every `h`-subset (small `n` only) and [`reweight`] turns a raw
//! estimate into the one-step reweighted scatter used by the depth function.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::gamma_lr;

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};

/// Largest number of subsets [`exact_mcd`] is willing to enumerate.
pub const EXACT_MCD_BUDGET: u64 = 200_000;
/// Random starts used by [`robust_scatter`].
pub const DEFAULT_STARTS: usize = 500;
/// Concentration steps applied to every random start.
const INITIAL_C_STEPS: usize = 2;
/// Candidates iterated to convergence.
const KEEP_BEST: usize = 10;
const MAX_C_STEPS: usize = 100;
const CONVERGENCE_TOL: f64 = 1e-12;
/// Reweighting cut-off quantile.
pub const REWEIGHT_QUANTILE: f64 = 0.975;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Raw,
    Reweighted,
}

/// Where the distances that drive the reweighting step come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceBasis {
    /// Raw MCD center and covariance.
    #[default]
    RawMcd,
    /// Classical sample mean and sample covariance.
    Classical,
}

/// Robust location and scatter of a data set.
#[derive(Debug, Clone)]
pub struct ScatterEstimate {
    pub center: Vec<f64>,
    pub covariance: DMatrix<f64>,
    /// Inverse of `covariance` (after any ridge regularization).
    pub inverse: DMatrix<f64>,
    pub consistency_factor: f64,
    pub h_subset: usize,
    /// Determinant of the unscaled covariance of the selected `h`-subset.
    pub raw_determinant: f64,
    pub stage: Stage,
    /// Sorted indices of the selected `h`-subset.
    pub subset: Vec<usize>,
}

impl ScatterEstimate {
    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

/// Default subset size `floor((n + p + 1) / 2)`.
pub fn default_h(n: usize, p: usize) -> usize {
    (n + p).div_ceil(2)
}

/// Smallest admissible subset size; equal to the default so the default is always valid.
fn min_h(n: usize, p: usize) -> usize {
    default_h(n, p)
}

pub fn chi2_cdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_lr(df / 2.0, x / 2.0)
}

/// Quantile of the chi-square distribution by bisection on the regularized
/// lower incomplete gamma function.
pub fn chi2_quantile(prob: f64, df: f64) -> f64 {
    if prob <= 0.0 {
        return 0.0;
    }
    if prob >= 1.0 {
        return f64::INFINITY;
    }
    let mut hi = df.max(1.0);
    while chi2_cdf(hi, df) < prob {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chi2_cdf(mid, df) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// MCD consistency correction `alpha / P(chi2_{p+2} <= q_alpha)` with
/// `q_alpha` the `alpha`-quantile of `chi2_p`.
pub fn consistency_factor(alpha: f64, p: usize) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let q = chi2_quantile(alpha, p as f64);
    alpha / chi2_cdf(q, p as f64 + 2.0)
}

/// Mean and maximum-likelihood covariance (denominator `|subset|`).
fn subset_moments(x: &DataMatrix, subset: &[usize]) -> (DVector<f64>, DMatrix<f64>) {
    let p = x.n_cols();
    let m = subset.len() as f64;
    let mut mean = DVector::zeros(p);
    for &i in subset {
        for (j, v) in x.row(i).iter().enumerate() {
            mean[j] += v;
        }
    }
    mean /= m;
    let mut cov = DMatrix::zeros(p, p);
    let mut d = vec![0.0; p];
    for &i in subset {
        for (j, v) in x.row(i).iter().enumerate() {
            d[j] = v - mean[j];
        }
        for a in 0..p {
            for b in a..p {
                cov[(a, b)] += d[a] * d[b];
            }
        }
    }
    for a in 0..p {
        for b in a..p {
            let v = cov[(a, b)] / m;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    (mean, cov)
}

/// Determinant of a symmetric positive semi-definite matrix; `0` when not positive-definite.
fn psd_determinant(cov: &DMatrix<f64>) -> f64 {
    match cov.clone().cholesky() {
        Some(ch) => ch.l().diagonal().iter().map(|v| v * v).product(),
        None => 0.0,
    }
}

/// Adds a ridge when the spectrum is nearly singular; fails on a zero-trace matrix.
pub fn regularize(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = cov.nrows();
    let mean_eig = cov.trace() / p as f64;
    if !mean_eig.is_finite() || mean_eig <= 0.0 {
        return Err(Error::DegenerateScatter);
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let min_eig = sym
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < 1e-10 * mean_eig {
        Ok(sym + DMatrix::identity(p, p) * (1e-8 * mean_eig))
    } else {
        Ok(sym)
    }
}

fn spd_inverse(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = cov
        .clone()
        .cholesky()
        .ok_or(Error::DegenerateScatter)?
        .inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Squared Mahalanobis norm `v^T inv v`.
#[inline]
pub fn mahalanobis_sq(v: &[f64], inv: &DMatrix<f64>) -> f64 {
    let p = v.len();
    let mut acc = 0.0;
    for a in 0..p {
        let mut row = 0.0;
        for b in 0..p {
            row += inv[(a, b)] * v[b];
        }
        acc += v[a] * row;
    }
    acc
}

fn distances_sq(x: &DataMatrix, center: &[f64], inv: &DMatrix<f64>) -> Vec<f64> {
    let mut d = vec![0.0; x.n_cols()];
    x.rows()
        .map(|row| {
            for (k, (a, b)) in row.iter().zip(center).enumerate() {
                d[k] = a - b;
            }
            mahalanobis_sq(&d, inv)
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Candidate {
    subset: Vec<usize>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    det: f64,
}

impl Candidate {
    fn from_subset(x: &DataMatrix, mut subset: Vec<usize>) -> Self {
        subset.sort_unstable();
        let (mean, cov) = subset_moments(x, &subset);
        let det = psd_determinant(&cov);
        Self {
            subset,
            mean,
            cov,
            det,
        }
    }

    /// One concentration step: keep the `h` points closest to the current fit.
    fn concentrate(&self, x: &DataMatrix, h: usize) -> Option<Self> {
        let cov = regularize(&self.cov).ok()?;
        let inv = spd_inverse(&cov).ok()?;
        let d2 = distances_sq(x, self.mean.as_slice(), &inv);
        let mut order: Vec<usize> = (0..x.n_rows()).collect();
        order.sort_by(|&a, &b| d2[a].total_cmp(&d2[b]).then(a.cmp(&b)));
        order.truncate(h);
        Some(Self::from_subset(x, order))
    }
}

fn check_inputs(x: &DataMatrix, h: usize) -> Result<()> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if n < p + 2 {
        return Err(Error::InsufficientData(format!(
            "MCD needs n >= p + 2 (n = {n}, p = {p})"
        )));
    }
    if h < min_h(n, p) || h > n {
        return Err(Error::InvalidParameter(format!(
            "h = {h} outside [{}, {n}]",
            min_h(n, p)
        )));
    }
    Ok(())
}

fn finish_raw(x: &DataMatrix, best: Candidate, h: usize) -> Result<ScatterEstimate> {
    let (n, p) = (x.n_rows(), x.n_cols());
    let factor = consistency_factor(h as f64 / n as f64, p);
    let covariance = regularize(&(&best.cov * factor))?;
    let inverse = spd_inverse(&covariance)?;
    Ok(ScatterEstimate {
        center: best.mean.iter().copied().collect(),
        covariance,
        inverse,
        consistency_factor: factor,
        h_subset: h,
        raw_determinant: best.det,
        stage: Stage::Raw,
        subset: best.subset,
    })
}

fn random_start(x: &DataMatrix, h: usize, seed: u64, start: usize) -> Option<Candidate> {
    let (n, p) = (x.n_rows(), x.n_cols());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);

    // Grow the elemental subset until its covariance is non-singular.
    let mut size = p + 1;
    let mut cand = Candidate::from_subset(x, perm[..size].to_vec());
    while cand.det <= 0.0 && size < n {
        size += 1;
        cand = Candidate::from_subset(x, perm[..size].to_vec());
    }
    let mut cand = cand.concentrate(x, h)?;
    for _ in 0..INITIAL_C_STEPS {
        if cand.det <= 0.0 {
            break;
        }
        cand = cand.concentrate(x, h)?;
    }
    Some(cand)
}

fn converge(x: &DataMatrix, h: usize, mut cand: Candidate) -> Candidate {
    for _ in 0..MAX_C_STEPS {
        if cand.det <= 0.0 {
            break;
        }
        let Some(next) = cand.concentrate(x, h) else {
            break;
        };
        let change = cand.det - next.det;
        let same = next.subset == cand.subset;
        if next.det <= cand.det {
            cand = next;
        }
        if same || change.abs() <= CONVERGENCE_TOL * cand.det.abs() {
            break;
        }
    }
    cand
}

/// Randomized FAST-MCD.
///
/// Each of the `n_starts` elemental starts draws from its own ChaCha8 stream
/// (`seed`, stream = start index), so results do not depend on scheduling.
pub fn fast_mcd(x: &DataMatrix, h: usize, seed: u64, n_starts: usize) -> Result<ScatterEstimate> {
    check_inputs(x, h)?;
    if n_starts == 0 {
        return Err(Error::InvalidParameter("n_starts must be >= 1".into()));
    }
    let n = x.n_rows();
    if h == n {
        let all = Candidate::from_subset(x, (0..n).collect());
        return finish_raw(x, all, h);
    }

    let starts: Vec<(usize, Candidate)> = (0..n_starts)
        .into_par_iter()
        .filter_map(|s| random_start(x, h, seed, s).map(|c| (s, c)))
        .collect();
    if starts.is_empty() {
        return Err(Error::DegenerateScatter);
    }

    let mut ranked = starts;
    ranked.sort_by(|a, b| a.1.det.total_cmp(&b.1.det).then(a.0.cmp(&b.0)));
    ranked.truncate(KEEP_BEST);

    let refined: Vec<Candidate> = ranked
        .into_par_iter()
        .map(|(_, c)| converge(x, h, c))
        .collect();
    let best = refined
        .into_iter()
        .reduce(|best, c| if c.det < best.det { c } else { best })
        .expect("at least one candidate");
    finish_raw(x, best, h)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exhaustive MCD over every `h`-subset; the reference the randomized search is checked against.
pub fn exact_mcd(x: &DataMatrix, h: usize) -> Result<ScatterEstimate> {
    check_inputs(x, h)?;
    let n = x.n_rows();
    if binomial(n, h) > EXACT_MCD_BUDGET as u128 {
        return Err(Error::CombinatorialBudget {
            n,
            h,
            budget: EXACT_MCD_BUDGET,
        });
    }
    let best = (0..n)
        .combinations(h)
        .map(|subset| Candidate::from_subset(x, subset))
        .reduce(|best, c| if c.det < best.det { c } else { best })
        .expect("n >= h >= 1");
    finish_raw(x, best, h)
}

/// One-step reweighting with hard rejection at `chi2_{p, 0.975}`.
pub fn reweight(x: &DataMatrix, raw: &ScatterEstimate) -> Result<ScatterEstimate> {
    reweight_with(x, raw, DistanceBasis::RawMcd)
}

pub fn reweight_with(
    x: &DataMatrix,
    raw: &ScatterEstimate,
    basis: DistanceBasis,
) -> Result<ScatterEstimate> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if raw.stage != Stage::Raw {
        return Err(Error::InvalidParameter(
            "reweight expects a raw estimate".into(),
        ));
    }
    if raw.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: raw.dim(),
        });
    }

    let d2 = match basis {
        DistanceBasis::RawMcd => distances_sq(x, &raw.center, &raw.inverse),
        DistanceBasis::Classical => {
            let all: Vec<usize> = (0..n).collect();
            let (mean, cov) = subset_moments(x, &all);
            let sample_cov = cov * (n as f64 / (n as f64 - 1.0));
            let inv = spd_inverse(&regularize(&sample_cov)?)?;
            distances_sq(x, mean.as_slice(), &inv)
        }
    };
    let cutoff = chi2_quantile(REWEIGHT_QUANTILE, p as f64);
    let weights: Vec<f64> = d2
        .iter()
        .map(|&d| if d <= cutoff { 1.0 } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::ReweightingCollapse);
    }

    let mut center = vec![0.0; p];
    for (row, w) in x.rows().zip(&weights) {
        if *w > 0.0 {
            for (c, v) in center.iter_mut().zip(row) {
                *c += v;
            }
        }
    }
    center.iter_mut().for_each(|c| *c /= total);

    let mut scatter = DMatrix::zeros(p, p);
    let mut d = vec![0.0; p];
    for (row, w) in x.rows().zip(&weights) {
        if *w == 0.0 {
            continue;
        }
        for k in 0..p {
            d[k] = row[k] - center[k];
        }
        for a in 0..p {
            for b in a..p {
                scatter[(a, b)] += d[a] * d[b];
            }
        }
    }
    let c1 = consistency_factor(REWEIGHT_QUANTILE, p);
    for a in 0..p {
        for b in a..p {
            let v = c1 * scatter[(a, b)] / n as f64;
            scatter[(a, b)] = v;
            scatter[(b, a)] = v;
        }
    }
    let covariance = regularize(&scatter)?;
    let inverse = spd_inverse(&covariance)?;
    Ok(ScatterEstimate {
        center,
        covariance,
        inverse,
        consistency_factor: c1,
        h_subset: raw.h_subset,
        raw_determinant: raw.raw_determinant,
        stage: Stage::Reweighted,
        subset: raw.subset.clone(),
    })
}

/// Options for the full robust scatter pipeline.
#[derive(Debug, Clone)]
pub struct ScatterOptions {
    /// Subset size; `None` uses [`default_h`].
    pub h: Option<usize>,
    pub n_starts: usize,
    pub basis: DistanceBasis,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self {
            h: None,
            n_starts: DEFAULT_STARTS,
            basis: DistanceBasis::RawMcd,
        }
    }
}

/// FAST-MCD followed by reweighting.
pub fn robust_scatter(
    x: &DataMatrix,
    seed: u64,
    options: &ScatterOptions,
) -> Result<ScatterEstimate> {
    let h = options
        .h
        .unwrap_or_else(|| default_h(x.n_rows(), x.n_cols()));
    let raw = fast_mcd(x, h, seed, options.n_starts)?;
    reweight_with(x, &raw, options.basis)
}
