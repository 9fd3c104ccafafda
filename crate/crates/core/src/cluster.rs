//! Adjacency construction, breadth-first cluster expansion and the four
//! clustering pipelines (CRAD, CRAD-DBSCAN, DBCA, Euclidean DBSCAN).

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::dataset::{DataMatrix, Labels, NOISE, UNASSIGNED};
use crate::depth::{self, DepthMatrix};
use crate::error::Result;
use crate::neighbor::{self, Fallback, NeighborParams};
use crate::robust_scatter::{robust_scatter, ScatterOptions};

/// Directed neighbor relation: row `i` lists the `j` with `A[i][j] = 1`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    rows: Vec<Vec<usize>>,
}

impl Adjacency {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        Self { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n()).all(|i| self.rows[i].iter().all(|&j| self.contains(j, i)))
    }

    /// Dense 0/1 view, mostly useful in tests.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        self.rows
            .iter()
            .map(|r| {
                let mut out = vec![0u8; n];
                r.iter().for_each(|&j| out[j] = 1);
                out
            })
            .collect()
    }
}

/// Builds the adjacency from a neighbor function. With `min_pts`, rows of points
/// whose neighbor set has at most `min_pts` members are left empty.
pub fn build_adjacency<F>(provider: F, n: usize, min_pts: Option<usize>) -> Adjacency
where
    F: Fn(usize) -> Vec<usize> + Sync,
{
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut nbrs = provider(i);
            nbrs.sort_unstable();
            nbrs.dedup();
            match min_pts {
                Some(m) if nbrs.len() <= m => Vec::new(),
                _ => nbrs,
            }
        })
        .collect();
    Adjacency { rows }
}

/// How the seed point's neighbors are labeled when a new cluster opens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignMode {
    /// Only unassigned neighbors join the new cluster.
    #[default]
    Guarded,
    /// Every neighbor of the seed is relabeled, even if it already belongs to a cluster.
    Overwrite,
}

/// Breadth-first expansion over an ungated adjacency.
///
/// Points whose neighbor set is only themselves become `0`; every other
/// unassigned point seeds a new cluster that grows through neighbors whose own
/// neighbor sets have more than one member.
pub fn expand_clusters(a: &Adjacency) -> Labels {
    expand_clusters_with(a, AssignMode::Guarded)
}

pub fn expand_clusters_with(a: &Adjacency, mode: AssignMode) -> Labels {
    let n = a.n();
    let mut labels = vec![UNASSIGNED; n];
    let mut label = 0;
    let mut queue = VecDeque::new();
    for i in 0..n {
        if labels[i] != UNASSIGNED {
            continue;
        }
        let nbrs = a.row(i);
        if nbrs.len() <= 1 {
            labels[i] = NOISE;
            continue;
        }
        label += 1;
        labels[i] = label;
        for &j in nbrs {
            if j == i {
                continue;
            }
            match mode {
                AssignMode::Guarded if labels[j] != UNASSIGNED => {}
                _ => {
                    labels[j] = label;
                    queue.push_back(j);
                }
            }
        }
        while let Some(cur) = queue.pop_front() {
            let snbrs = a.row(cur);
            if snbrs.len() <= 1 {
                continue;
            }
            for &x in snbrs {
                if labels[x] == UNASSIGNED {
                    labels[x] = label;
                    queue.push_back(x);
                }
            }
        }
    }
    compact(labels)
}

/// DBSCAN expansion over a gated adjacency: non-empty rows are core points.
/// Border points join the first cluster that reaches them; unreachable points are `0`.
pub fn expand_dbscan(a: &Adjacency) -> Labels {
    let n = a.n();
    let mut labels = vec![UNASSIGNED; n];
    let mut label = 0;
    let mut queue = VecDeque::new();
    for i in 0..n {
        if labels[i] != UNASSIGNED || a.row(i).is_empty() {
            continue;
        }
        label += 1;
        labels[i] = label;
        queue.push_back(i);
        while let Some(cur) = queue.pop_front() {
            for &x in a.row(cur) {
                if labels[x] == UNASSIGNED {
                    labels[x] = label;
                    if !a.row(x).is_empty() {
                        queue.push_back(x);
                    }
                }
            }
        }
    }
    for l in labels.iter_mut() {
        if *l == UNASSIGNED {
            *l = NOISE;
        }
    }
    compact(labels)
}

/// Renumbers cluster ids to `1..=k`, preserving creation order.
fn compact(mut labels: Vec<i64>) -> Labels {
    let mut ids: Vec<i64> = labels.iter().copied().filter(|&l| l >= 1).collect();
    ids.sort_unstable();
    ids.dedup();
    for l in labels.iter_mut() {
        if *l >= 1 {
            *l = ids.binary_search(l).expect("id present") as i64 + 1;
        }
    }
    Labels::new(labels)
}

/// Knobs shared by the depth-based pipelines.
#[derive(Debug, Clone, Default)]
pub struct DepthOptions {
    pub scatter: ScatterOptions,
    pub fallback: Fallback,
    pub assign: AssignMode,
}

/// Reweighted-MCD scatter followed by the pairwise depth matrix.
pub fn depth_model(x: &DataMatrix, seed: u64, options: &ScatterOptions) -> Result<DepthMatrix> {
    if x.n_rows() == 1 {
        return Ok(depth::singleton());
    }
    let scatter = robust_scatter(x, seed, options)?;
    depth::depth_matrix(x, &scatter)
}

/// CRAD neighbor sets for every point.
pub fn crad_adjacency(
    depth: &DepthMatrix,
    params: NeighborParams,
    fallback: Fallback,
    min_pts: Option<usize>,
) -> Adjacency {
    build_adjacency(
        |i| neighbor::nbr_crad_point(depth.row(i), i, params, fallback),
        depth.n(),
        min_pts,
    )
}

pub fn crad_from_depth(
    depth: &DepthMatrix,
    params: NeighborParams,
    options: &DepthOptions,
) -> Labels {
    let a = crad_adjacency(depth, params, options.fallback, None);
    expand_clusters_with(&a, options.assign)
}

pub fn crad_dbscan_from_depth(
    depth: &DepthMatrix,
    params: NeighborParams,
    min_pts: usize,
    options: &DepthOptions,
) -> Labels {
    expand_dbscan(&crad_adjacency(
        depth,
        params,
        options.fallback,
        Some(min_pts),
    ))
}

pub fn dbca_from_depth(depth: &DepthMatrix, theta: f64, options: &DepthOptions) -> Labels {
    let a = build_adjacency(|i| neighbor::nbr_dbca(depth.row(i), theta), depth.n(), None);
    expand_clusters_with(&a, options.assign)
}

/// CRAD: per-point histogram cut-offs on robust depth, then cluster expansion.
pub fn crad(x: &DataMatrix, params: NeighborParams, seed: u64) -> Result<Labels> {
    crad_with(x, params, seed, &DepthOptions::default())
}

pub fn crad_with(
    x: &DataMatrix,
    params: NeighborParams,
    seed: u64,
    options: &DepthOptions,
) -> Result<Labels> {
    let depth = depth_model(x, seed, &options.scatter)?;
    Ok(crad_from_depth(&depth, params, options))
}

/// DBSCAN with the CRAD neighbor function; core points have more than `min_pts` neighbors.
pub fn crad_dbscan(
    x: &DataMatrix,
    params: NeighborParams,
    min_pts: usize,
    seed: u64,
) -> Result<Labels> {
    crad_dbscan_with(x, params, min_pts, seed, &DepthOptions::default())
}

pub fn crad_dbscan_with(
    x: &DataMatrix,
    params: NeighborParams,
    min_pts: usize,
    seed: u64,
    options: &DepthOptions,
) -> Result<Labels> {
    let depth = depth_model(x, seed, &options.scatter)?;
    Ok(crad_dbscan_from_depth(&depth, params, min_pts, options))
}

/// Depth-based clustering with one global threshold `theta`.
pub fn dbca(x: &DataMatrix, theta: f64, seed: u64) -> Result<Labels> {
    dbca_with(x, theta, seed, &DepthOptions::default())
}

pub fn dbca_with(x: &DataMatrix, theta: f64, seed: u64, options: &DepthOptions) -> Result<Labels> {
    let depth = depth_model(x, seed, &options.scatter)?;
    Ok(dbca_from_depth(&depth, theta, options))
}

/// Classical DBSCAN with Euclidean balls of radius `epsilon`.
pub fn dbscan_eu(x: &DataMatrix, epsilon: f64, min_pts: usize) -> Labels {
    let a = build_adjacency(
        |i| neighbor::nbr_euclid(x, i, epsilon),
        x.n_rows(),
        Some(min_pts),
    );
    expand_dbscan(&a)
}

/// Pairwise Euclidean distances, row-major `n x n`.
pub fn pairwise_distances(x: &DataMatrix) -> Vec<f64> {
    let n = x.n_rows();
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let xi = x.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = neighbor::euclidean(xi, x.row(j));
            }
        });
    out
}

/// [`dbscan_eu`] over precomputed distances, for parameter sweeps.
pub fn dbscan_from_distances(distances: &[f64], n: usize, epsilon: f64, min_pts: usize) -> Labels {
    let a = build_adjacency(
        |i| {
            distances[i * n..(i + 1) * n]
                .iter()
                .enumerate()
                .filter(|(_, &d)| d <= epsilon)
                .map(|(j, _)| j)
                .collect()
        },
        n,
        Some(min_pts),
    );
    expand_dbscan(&a)
}
