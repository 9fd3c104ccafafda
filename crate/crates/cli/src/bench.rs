//! Best-achievable benchmark: every algorithm over its full parameter grid,
//! scored against ground truth, averaged over seeds.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crad::cluster::{
    crad_dbscan_from_depth, crad_from_depth, dbca_from_depth, dbscan_from_distances, depth_model,
    pairwise_distances, DepthOptions,
};
use crad::dataset::standardize;
use crad::metrics::{ami, rand_index};
use crad::synthgen::GenSpec;
use crad::{DataMatrix, Labels, NeighborParams};

use crate::io::{load_input, TruthColumn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchAlgorithm {
    Crad,
    CradDbscan,
    Dbca,
    Dbscan,
}

impl BenchAlgorithm {
    pub const ALL: [BenchAlgorithm; 4] = [Self::Crad, Self::CradDbscan, Self::Dbca, Self::Dbscan];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Crad => "crad",
            Self::CradDbscan => "crad-dbscan",
            Self::Dbca => "dbca",
            Self::Dbscan => "dbscan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Raw,
    Standardized,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::Standardized => "standardized",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Grids {
    pub nbin: Vec<usize>,
    pub step_size: Vec<usize>,
    pub theta: Vec<f64>,
    pub eps_steps: usize,
    pub min_pts: Vec<usize>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            nbin: (80..=700).step_by(10).collect(),
            step_size: vec![1],
            theta: (0..=10).map(|k| (80 + 2 * k) as f64 / 100.0).collect(),
            eps_steps: 50,
            min_pts: (2..=6).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    File {
        path: PathBuf,
        #[serde(default)]
        truth_column: Option<String>,
    },
    Generated {
        generate: GenSpec,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    #[serde(flatten)]
    pub source: Source,
}

fn default_algorithms() -> Vec<BenchAlgorithm> {
    BenchAlgorithm::ALL.to_vec()
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Raw, Mode::Standardized]
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub datasets: Vec<DatasetSpec>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<BenchAlgorithm>,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grids: Grids,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub algorithm: &'static str,
    pub mode: &'static str,
    pub trials: usize,
    pub cells: usize,
    pub best_ri: f64,
    pub best_ri_params: String,
    pub best_ami: f64,
    pub best_ami_params: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Per dataset and algorithm, the better mode for each metric.
    pub summary: Vec<SummaryRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: &'static str,
    pub best_ri: f64,
    pub best_ri_mode: &'static str,
    pub best_ami: f64,
    pub best_ami_mode: &'static str,
}

/// One grid cell: a parameter description and the labeling it produced.
struct Cell {
    params: String,
    ri: f64,
    ami: f64,
}

/// Evenly spaced values from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Epsilon grid: smallest to half the largest off-diagonal pairwise distance.
pub fn epsilon_grid(distances: &[f64], n: usize, steps: usize) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distances[i * n + j];
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if !lo.is_finite() {
        return vec![];
    }
    linspace(lo, (hi / 2.0).max(lo), steps)
}

fn best_of(cells: &[Cell]) -> (f64, String, f64, String) {
    let mut ri = (f64::NEG_INFINITY, String::new());
    let mut am = (f64::NEG_INFINITY, String::new());
    for c in cells {
        if c.ri > ri.0 {
            ri = (c.ri, c.params.clone());
        }
        if c.ami > am.0 {
            am = (c.ami, c.params.clone());
        }
    }
    (ri.0, ri.1, am.0, am.1)
}

fn score(labels: &Labels, truth: &Labels, params: String) -> Cell {
    Cell {
        params,
        ri: rand_index(labels, truth).expect("lengths match"),
        ami: ami(labels, truth).expect("lengths match"),
    }
}

/// Evaluates every requested algorithm over its grid for one seed.
fn evaluate_trial(
    x: &DataMatrix,
    truth: &Labels,
    algorithms: &[BenchAlgorithm],
    grids: &Grids,
    seed: u64,
) -> Result<Vec<Vec<Cell>>> {
    let options = DepthOptions::default();
    let needs_depth = algorithms.iter().any(|a| *a != BenchAlgorithm::Dbscan);
    let depth = if needs_depth {
        Some(depth_model(x, seed, &options.scatter)?)
    } else {
        None
    };
    let params: Vec<NeighborParams> = grids
        .nbin
        .iter()
        .flat_map(|&b| grids.step_size.iter().map(move |&s| (b, s)))
        .filter_map(|(b, s)| NeighborParams::new(b, s).ok())
        .collect();

    let mut out = Vec::with_capacity(algorithms.len());
    for alg in algorithms {
        let cells: Vec<Cell> = match alg {
            BenchAlgorithm::Crad => {
                let d = depth.as_ref().expect("depth computed");
                params
                    .par_iter()
                    .map(|&p| {
                        let l = crad_from_depth(d, p, &options);
                        score(
                            &l,
                            truth,
                            format!("nbin={},step={}", p.n_bins(), p.step_size()),
                        )
                    })
                    .collect()
            }
            BenchAlgorithm::CradDbscan => {
                let d = depth.as_ref().expect("depth computed");
                let pairs: Vec<(NeighborParams, usize)> = params
                    .iter()
                    .flat_map(|&p| grids.min_pts.iter().map(move |&m| (p, m)))
                    .collect();
                pairs
                    .par_iter()
                    .map(|&(p, m)| {
                        let l = crad_dbscan_from_depth(d, p, m, &options);
                        score(
                            &l,
                            truth,
                            format!("nbin={},step={},min_pts={m}", p.n_bins(), p.step_size()),
                        )
                    })
                    .collect()
            }
            BenchAlgorithm::Dbca => {
                let d = depth.as_ref().expect("depth computed");
                grids
                    .theta
                    .par_iter()
                    .map(|&t| {
                        score(
                            &dbca_from_depth(d, t, &options),
                            truth,
                            format!("theta={t}"),
                        )
                    })
                    .collect()
            }
            BenchAlgorithm::Dbscan => {
                let n = x.n_rows();
                let dist = pairwise_distances(x);
                let eps = epsilon_grid(&dist, n, grids.eps_steps);
                let pairs: Vec<(f64, usize)> = eps
                    .iter()
                    .flat_map(|&e| grids.min_pts.iter().map(move |&m| (e, m)))
                    .collect();
                pairs
                    .par_iter()
                    .map(|&(e, m)| {
                        let l = dbscan_from_distances(&dist, n, e, m);
                        score(&l, truth, format!("eps={e},min_pts={m}"))
                    })
                    .collect()
            }
        };
        out.push(cells);
    }
    Ok(out)
}

/// Runs one dataset through every algorithm and mode.
pub fn bench_dataset(
    name: &str,
    x: &DataMatrix,
    truth: &Labels,
    config: &BenchConfig,
) -> Result<Vec<BenchRow>> {
    if config.trials == 0 {
        bail!("trials must be >= 1");
    }
    let mut rows = Vec::new();
    for &mode in &config.modes {
        let data = match mode {
            Mode::Raw => x.clone(),
            Mode::Standardized => standardize(x)?,
        };
        let mut sums = vec![(0.0, 0.0); config.algorithms.len()];
        let mut first: Vec<(String, String)> = Vec::new();
        let mut cells = vec![0; config.algorithms.len()];
        for t in 0..config.trials {
            let seed = config.seed + t as u64;
            let results = evaluate_trial(&data, truth, &config.algorithms, &config.grids, seed)
                .with_context(|| format!("dataset {name}, mode {}, seed {seed}", mode.name()))?;
            for (k, res) in results.iter().enumerate() {
                let (ri, rp, am, ap) = best_of(res);
                sums[k].0 += ri;
                sums[k].1 += am;
                cells[k] = res.len();
                if t == 0 {
                    first.push((rp, ap));
                }
            }
        }
        for (k, alg) in config.algorithms.iter().enumerate() {
            rows.push(BenchRow {
                dataset: name.to_string(),
                algorithm: alg.name(),
                mode: mode.name(),
                trials: config.trials,
                cells: cells[k],
                best_ri: sums[k].0 / config.trials as f64,
                best_ri_params: first[k].0.clone(),
                best_ami: sums[k].1 / config.trials as f64,
                best_ami_params: first[k].1.clone(),
            });
        }
    }
    Ok(rows)
}

pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    for r in rows {
        match out
            .iter_mut()
            .find(|s| s.dataset == r.dataset && s.algorithm == r.algorithm)
        {
            None => out.push(SummaryRow {
                dataset: r.dataset.clone(),
                algorithm: r.algorithm,
                best_ri: r.best_ri,
                best_ri_mode: r.mode,
                best_ami: r.best_ami,
                best_ami_mode: r.mode,
            }),
            Some(s) => {
                if r.best_ri > s.best_ri {
                    s.best_ri = r.best_ri;
                    s.best_ri_mode = r.mode;
                }
                if r.best_ami > s.best_ami {
                    s.best_ami = r.best_ami;
                    s.best_ami_mode = r.mode;
                }
            }
        }
    }
    out
}

pub fn load_dataset(spec: &DatasetSpec, base: &Path) -> Result<(DataMatrix, Labels)> {
    match &spec.source {
        Source::File { path, truth_column } => {
            let path = if path.is_absolute() {
                path.clone()
            } else {
                base.join(path)
            };
            let col = match truth_column.as_deref() {
                None => TruthColumn::Last,
                Some(s) => s.parse().map_err(anyhow::Error::msg)?,
            };
            let input = load_input(&path, col)?;
            match input.truth {
                Some(t) => Ok((input.x, t)),
                None => bail!("dataset {} has no ground-truth column", spec.name),
            }
        }
        Source::Generated { generate } => Ok(generate.generate()?),
    }
}

/// Runs the whole configuration; relative dataset paths resolve against `base`.
pub fn run_bench(config: &BenchConfig, base: &Path) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for spec in &config.datasets {
        let (x, truth) = load_dataset(spec, base)?;
        rows.extend(bench_dataset(&spec.name, &x, &truth, config)?);
    }
    let summary = summarize(&rows);
    Ok(BenchReport { rows, summary })
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(
        "dataset,algorithm,mode,trials,cells,best_ri,best_ri_params,best_ami,best_ami_params\n",
    );
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{:.6},\"{}\",{:.6},\"{}\"\n",
            r.dataset,
            r.algorithm,
            r.mode,
            r.trials,
            r.cells,
            r.best_ri,
            r.best_ri_params,
            r.best_ami,
            r.best_ami_params
        ));
    }
    s
}
