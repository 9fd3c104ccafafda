//! External (Rand index, adjusted mutual information) and internal
//! (Calinski-Harabasz) validity measures.

use std::collections::HashMap;

use crate::dataset::{DataMatrix, Labels, NOISE};
use crate::error::{Error, Result};

/// How label `0` is interpreted by the external metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// All `0` points form one cluster.
    #[default]
    OneCluster,
    /// Every `0` point is its own cluster.
    Singletons,
}

/// Cross-tabulation of two partitions of the same points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    cells: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn from_cells(cells: Vec<Vec<u64>>) -> Self {
        let c = cells.first().map_or(0, Vec::len);
        let row_sums: Vec<u64> = cells.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..c).map(|j| cells.iter().map(|r| r[j]).sum()).collect();
        let total = row_sums.iter().sum();
        Self {
            cells,
            row_sums,
            col_sums,
            total,
        }
    }

    pub fn new(u: &Labels, v: &Labels, mode: NoiseMode) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::LengthMismatch(u.len(), v.len()));
        }
        let ui = cluster_indices(u, mode);
        let vi = cluster_indices(v, mode);
        let r = ui.iter().max().map_or(0, |m| m + 1);
        let c = vi.iter().max().map_or(0, |m| m + 1);
        let mut cells = vec![vec![0u64; c]; r];
        for (a, b) in ui.iter().zip(&vi) {
            cells[*a][*b] += 1;
        }
        Ok(Self::from_cells(cells))
    }

    pub fn cells(&self) -> &[Vec<u64>] {
        &self.cells
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// True when both partitions group the points identically.
    pub fn is_matching(&self) -> bool {
        let nonzero_rows = self
            .cells
            .iter()
            .all(|r| r.iter().filter(|&&v| v > 0).count() <= 1);
        let nonzero_cols =
            (0..self.col_sums.len()).all(|j| self.cells.iter().filter(|r| r[j] > 0).count() <= 1);
        nonzero_rows && nonzero_cols
    }
}

/// Dense cluster indices `0..k`, by first appearance.
fn cluster_indices(labels: &Labels, mode: NoiseMode) -> Vec<usize> {
    let mut map = HashMap::new();
    let mut next = 0;
    labels
        .as_slice()
        .iter()
        .map(|&l| {
            if mode == NoiseMode::Singletons && l == NOISE {
                next += 1;
                next - 1
            } else {
                *map.entry(l).or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            }
        })
        .collect()
}

fn pairs(k: u64) -> u128 {
    let k = k as u128;
    k * k.saturating_sub(1) / 2
}

/// Fraction of point pairs on which two partitions agree.
pub fn rand_index(u: &Labels, v: &Labels) -> Result<f64> {
    rand_index_with(u, v, NoiseMode::OneCluster)
}

pub fn rand_index_with(u: &Labels, v: &Labels, mode: NoiseMode) -> Result<f64> {
    let t = ContingencyTable::new(u, v, mode)?;
    if t.total < 2 {
        return Err(Error::InsufficientData(
            "Rand index needs at least 2 points".into(),
        ));
    }
    let together_both: u128 = t.cells.iter().flatten().map(|&c| pairs(c)).sum();
    let together_u: u128 = t.row_sums.iter().map(|&c| pairs(c)).sum();
    let together_v: u128 = t.col_sums.iter().map(|&c| pairs(c)).sum();
    let total = pairs(t.total);
    let agree = total + 2 * together_both - together_u - together_v;
    Ok(agree as f64 / total as f64)
}

fn entropy_of_counts(counts: &[u64], n: u64) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Natural-log entropy of the cluster proportions.
pub fn entropy(u: &Labels) -> f64 {
    entropy_with(u, NoiseMode::OneCluster)
}

pub fn entropy_with(u: &Labels, mode: NoiseMode) -> f64 {
    let idx = cluster_indices(u, mode);
    let k = idx.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0u64; k];
    idx.iter().for_each(|&i| counts[i] += 1);
    entropy_of_counts(&counts, u.len() as u64)
}

pub fn mutual_information(t: &ContingencyTable) -> f64 {
    let n = t.total as f64;
    let mut mi = 0.0;
    for (i, row) in t.cells.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pij = c as f64 / n;
            let a = t.row_sums[i] as f64;
            let b = t.col_sums[j] as f64;
            mi += pij * (c as f64 * n / (a * b)).ln();
        }
    }
    mi.max(0.0)
}

/// `ln(k!)` for `k = 0..=n`.
fn log_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Expected mutual information under the hypergeometric (fixed-marginals permutation) model.
pub fn expected_mi(t: &ContingencyTable) -> f64 {
    let n = t.total;
    if n == 0 {
        return 0.0;
    }
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed =
                lf[a as usize] + lf[b as usize] + lf[(n - a) as usize] + lf[(n - b) as usize]
                    - lf[n as usize];
            for nij in lo..=hi {
                let nijf = nij as f64;
                let term = nijf / nf * (nf * nijf / (a as f64 * b as f64)).ln();
                let log_p = fixed
                    - lf[nij as usize]
                    - lf[(a - nij) as usize]
                    - lf[(b - nij) as usize]
                    - lf[(n + nij - a - b) as usize];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information, normalized by the larger of the two entropies.
pub fn ami(u: &Labels, v: &Labels) -> Result<f64> {
    ami_with(u, v, NoiseMode::OneCluster)
}

pub fn ami_with(u: &Labels, v: &Labels, mode: NoiseMode) -> Result<f64> {
    let t = ContingencyTable::new(u, v, mode)?;
    Ok(ami_from_table(&t))
}

pub fn ami_from_table(t: &ContingencyTable) -> f64 {
    let hu = entropy_of_counts(&t.row_sums, t.total);
    let hv = entropy_of_counts(&t.col_sums, t.total);
    let mi = mutual_information(t);
    let emi = expected_mi(t);
    let denom = hu.max(hv) - emi;
    if denom.abs() <= 1e-15 * hu.max(hv).max(1.0) {
        return if t.is_matching() { 1.0 } else { 0.0 };
    }
    (mi - emi) / denom
}

/// Distance used for the between/within dispersion sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispersion {
    /// Squared Euclidean norms (the usual sums of squares).
    #[default]
    Squared,
    /// Plain Euclidean norms.
    Unsquared,
}

/// Calinski-Harabasz score over the points labeled `>= 1`.
///
/// Returns `+inf` when the within-cluster dispersion is zero.
pub fn calinski_harabasz(x: &DataMatrix, labels: &Labels) -> Result<f64> {
    calinski_harabasz_with(x, labels, Dispersion::Squared)
}

pub fn calinski_harabasz_with(
    x: &DataMatrix,
    labels: &Labels,
    dispersion: Dispersion,
) -> Result<f64> {
    if labels.len() != x.n_rows() {
        return Err(Error::LengthMismatch(x.n_rows(), labels.len()));
    }
    let p = x.n_cols();
    let mut index = HashMap::new();
    let mut sums: Vec<Vec<f64>> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut members = Vec::new();
    let mut grand = vec![0.0; p];
    for (i, &l) in labels.as_slice().iter().enumerate() {
        if l < 1 {
            continue;
        }
        let k = *index.entry(l).or_insert_with(|| {
            sums.push(vec![0.0; p]);
            sizes.push(0);
            sums.len() - 1
        });
        for (j, v) in x.row(i).iter().enumerate() {
            sums[k][j] += v;
            grand[j] += v;
        }
        sizes[k] += 1;
        members.push((i, k));
    }
    let k = sizes.len();
    let n = members.len();
    if k < 2 {
        return Err(Error::ChUndefined(format!(
            "{k} cluster(s) after excluding noise"
        )));
    }
    if n <= k {
        return Err(Error::ChUndefined(format!("{n} points for {k} clusters")));
    }
    grand.iter_mut().for_each(|g| *g /= n as f64);
    let centers: Vec<Vec<f64>> = sums
        .iter()
        .zip(&sizes)
        .map(|(s, &m)| s.iter().map(|v| v / m as f64).collect())
        .collect();

    let norm = |a: &[f64], b: &[f64]| {
        let sq: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
        match dispersion {
            Dispersion::Squared => sq,
            Dispersion::Unsquared => sq.sqrt(),
        }
    };
    let trace_b: f64 = centers
        .iter()
        .zip(&sizes)
        .map(|(c, &m)| m as f64 * norm(c, &grand))
        .sum();
    let trace_w: f64 = members
        .iter()
        .map(|&(i, c)| norm(x.row(i), &centers[c]))
        .sum();
    if trace_w == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((trace_b / (k - 1) as f64) / (trace_w / (n - k) as f64))
}
