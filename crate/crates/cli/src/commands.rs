//! Subcommand definitions and their implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crad::cluster::{crad_dbscan_with, crad_with, dbca_with, dbscan_eu, AssignMode, DepthOptions};
use crad::dataset::{standardize, write_csv};
use crad::metrics::{ami_with, calinski_harabasz, rand_index_with, NoiseMode};
use crad::robust_scatter::{ScatterOptions, DEFAULT_STARTS};
use crad::synthgen::{add_gaussian_noise, GenSpec, NoiseScale, Recipe};
use crad::tuning::{default_grid, sweep_nbin, Score, SweepAlgorithm};
use crad::{DataMatrix, Fallback, Labels, NeighborParams};

use crate::bench::{rows_to_csv, run_bench, BenchConfig};
use crate::io::{load_input, read_label_file, write_labels, write_string, TruthColumn};
use crate::report::{Fingerprint, Metrics, Params, RunReport, VERSION};
use crate::svg;
use crate::UsageError;

#[derive(Debug, Parser)]
#[command(
    name = "crad",
    version,
    about = "Density-based clustering on robust Mahalanobis depth"
)]
pub struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, env = "CRAD_JOBS", global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset as CSV with a final `label` column.
    Gen(GenArgs),
    /// Cluster a CSV file and write `row_index,label`.
    Cluster(ClusterArgs),
    /// Sweep the histogram resolution and pick the best CH score.
    Sweep(SweepArgs),
    /// Compare a labeling with ground truth (RI and AMI).
    Eval(EvalArgs),
    /// Best-achievable RI/AMI over full parameter grids.
    Bench(BenchArgs),
    /// 2-D scatter plot of a labeled dataset as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RecipeKind {
    Toy,
    Gaussians,
    Cassini,
    Spirals,
    Mixture,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub recipe: RecipeKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Point count for cassini and spirals.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub turns: f64,
    /// Spiral jitter standard deviation.
    #[arg(long, default_value_t = 0.05)]
    pub sd: f64,
    /// Gaussian centers, e.g. "0,0;4,0".
    #[arg(long)]
    pub centers: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    /// Uniform background noise as a fraction of the point count.
    #[arg(long, default_value_t = 0.0)]
    pub noise_ratio: f64,
    /// Gaussian perturbation added to every coordinate.
    #[arg(long)]
    pub gaussian_noise: Option<f64>,
    /// Read --gaussian-noise as a variance instead of a standard deviation.
    #[arg(long)]
    pub variance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Crad,
    CradDbscan,
    Dbca,
    Dbscan,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FallbackArg {
    All,
    SelfOnly,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    pub input: PathBuf,
    /// Ground-truth column: auto (a header named "label"), none, last, or an index.
    #[arg(long, default_value = "auto")]
    pub truth_col: TruthColumn,
    /// Z-score every column before clustering.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// FAST-MCD random starts.
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub n_starts: usize,
    /// Neighbor set when a depth histogram has no local minimum.
    #[arg(long, value_enum, default_value = "all")]
    pub fallback: FallbackArg,
    /// Relabel already-assigned neighbors of a new seed point.
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long)]
    pub nbin: Option<usize>,
    #[arg(long)]
    pub step: Option<usize>,
    /// Pick nbin by CH over the default grid (crad variants).
    #[arg(long)]
    pub auto: bool,
    #[arg(long)]
    pub min_pts: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAlgo {
    Crad,
    CradDbscan,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "crad")]
    pub algo: SweepAlgo,
    /// Nbin range "start:end:step", end included.
    #[arg(long, conflicts_with = "auto_grid")]
    pub grid: Option<String>,
    #[arg(long)]
    pub auto_grid: bool,
    #[arg(long, default_value_t = 1)]
    pub step_size: usize,
    #[arg(long)]
    pub min_pts: Option<usize>,
    /// JSON output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the winning labeling.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NoiseModeArg {
    OneCluster,
    Singletons,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub labels: PathBuf,
    pub truth: PathBuf,
    #[arg(long, value_enum, default_value = "one-cluster")]
    pub noise_mode: NoiseModeArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub config: PathBuf,
    /// Directory receiving bench.csv and bench.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub input: PathBuf,
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Zero-based feature columns, e.g. "0,1".
    #[arg(long, default_value = "0,1")]
    pub cols: String,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_centers(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|c| {
            c.split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| usage(format!("bad center {c:?}")))
        })
        .collect()
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let recipe = match a.recipe {
        RecipeKind::Toy => Recipe::Toy,
        RecipeKind::Mixture => Recipe::Mixture,
        RecipeKind::Cassini => Recipe::Cassini {
            n: a.n.unwrap_or(500),
        },
        RecipeKind::Spirals => Recipe::Spirals {
            n: a.n.unwrap_or(400),
            turns: a.turns,
            sd: a.sd,
        },
        RecipeKind::Gaussians => {
            let centers = parse_centers(
                a.centers
                    .as_deref()
                    .ok_or_else(|| usage("gaussians requires --centers"))?,
            )?;
            let k = centers.len();
            Recipe::Gaussians {
                centers,
                scales: a.scales.unwrap_or_else(|| vec![1.0; k]),
                counts: a.counts.unwrap_or_else(|| vec![100; k]),
            }
        }
    };
    let spec = GenSpec {
        recipe,
        seed: a.seed,
        noise_ratio: a.noise_ratio,
    };
    let (mut x, labels) = spec.generate()?;
    if let Some(m) = a.gaussian_noise {
        let scale = if a.variance {
            NoiseScale::Variance
        } else {
            NoiseScale::StdDev
        };
        x = add_gaussian_noise(&x, m, scale, a.seed)?;
    }
    let file = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_csv(std::io::BufWriter::new(file), &x, Some(&labels))?;
    println!("{}", a.out.display());
    Ok(())
}

struct Prepared {
    x: DataMatrix,
    truth: Option<Labels>,
    fingerprint: Fingerprint,
    options: DepthOptions,
}

fn prepare(d: &DataArgs) -> Result<Prepared> {
    let input = load_input(&d.input, d.truth_col)?;
    let x = if d.standardize {
        standardize(&input.x)?
    } else {
        input.x
    };
    let options = DepthOptions {
        scatter: ScatterOptions {
            n_starts: d.n_starts,
            ..ScatterOptions::default()
        },
        fallback: match d.fallback {
            FallbackArg::All => Fallback::AllPoints,
            FallbackArg::SelfOnly => Fallback::SelfOnly,
        },
        assign: if d.overwrite {
            AssignMode::Overwrite
        } else {
            AssignMode::Guarded
        },
    };
    Ok(Prepared {
        fingerprint: Fingerprint {
            path: d.input.display().to_string(),
            n: x.n_rows(),
            p: x.n_cols(),
            sha256: input.sha256,
        },
        x,
        truth: input.truth,
        options,
    })
}

fn neighbor_params(nbin: Option<usize>, step: Option<usize>) -> Result<NeighborParams> {
    match (nbin, step) {
        (Some(b), Some(s)) => NeighborParams::new(b, s).map_err(|e| usage(e.to_string())),
        _ => Err(usage(
            "--nbin and --step are required unless --auto is given",
        )),
    }
}

fn ch_score(x: &DataMatrix, labels: &Labels) -> Score {
    match calinski_harabasz(x, labels) {
        Ok(v) if v.is_finite() => Score::Finite(v),
        Ok(_) => Score::Infinite,
        Err(_) => Score::Undefined,
    }
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    let p = prepare(&a.data)?;
    let seed = a.data.seed;
    let mut params = Params {
        auto: a.auto,
        standardize: a.data.standardize,
        fallback: format!("{:?}", p.options.fallback),
        assign: format!("{:?}", p.options.assign),
        n_starts: a.data.n_starts,
        ..Params::default()
    };
    let start = Instant::now();
    let labels = match a.algo {
        Algo::Crad | Algo::CradDbscan => {
            let alg = if a.algo == Algo::Crad {
                SweepAlgorithm::Crad
            } else {
                let m = a
                    .min_pts
                    .ok_or_else(|| usage("crad-dbscan requires --min-pts"))?;
                params.min_pts = Some(m);
                SweepAlgorithm::CradDbscan { min_pts: m }
            };
            if a.auto {
                let res = sweep_nbin(&p.x, alg, &default_grid(p.x.n_rows()), seed, &p.options)?;
                params.n_bins = Some(res.best.n_bins);
                params.step_size = Some(res.best.step_size);
                res.best_labels
            } else {
                let np = neighbor_params(a.nbin, a.step)?;
                params.n_bins = Some(np.n_bins());
                params.step_size = Some(np.step_size());
                match alg {
                    SweepAlgorithm::Crad => crad_with(&p.x, np, seed, &p.options)?,
                    SweepAlgorithm::CradDbscan { min_pts } => {
                        crad_dbscan_with(&p.x, np, min_pts, seed, &p.options)?
                    }
                }
            }
        }
        Algo::Dbca => {
            let t = a.theta.ok_or_else(|| usage("dbca requires --theta"))?;
            params.theta = Some(t);
            dbca_with(&p.x, t, seed, &p.options)?
        }
        Algo::Dbscan => {
            let e = a.eps.ok_or_else(|| usage("dbscan requires --eps"))?;
            let m = a
                .min_pts
                .ok_or_else(|| usage("dbscan requires --min-pts"))?;
            params.epsilon = Some(e);
            params.min_pts = Some(m);
            dbscan_eu(&p.x, e, m)
        }
    };
    let wall_ms = start.elapsed().as_millis() as u64;
    write_labels(&a.out, &labels)?;

    let (ri, ami) = match &p.truth {
        Some(t) => (
            Some(rand_index_with(&labels, t, NoiseMode::OneCluster)?),
            Some(ami_with(&labels, t, NoiseMode::OneCluster)?),
        ),
        None => (None, None),
    };
    let report = RunReport {
        algorithm: format!("{:?}", a.algo).to_lowercase(),
        params,
        dataset: p.fingerprint,
        labels_path: a.out.display().to_string(),
        metrics: Metrics {
            ri,
            ami,
            ch: ch_score(&p.x, &labels),
            n_clusters: labels.n_clusters(),
            noise: labels.noise_count(),
        },
        wall_ms,
        seed,
        version: VERSION,
    };
    let json = serde_json::to_string_pretty(&report)?;
    match &a.report {
        Some(path) => write_string(path, &(json + "\n"))?,
        None => println!("{json}"),
    }
    Ok(())
}

/// Parses "start:end:step" into an inclusive Nbin range.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|v| v.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("bad grid {s:?}, expected start:end:step")))?;
    match nums.as_slice() {
        [a, b, st] if *st > 0 && a <= b => Ok((*a..=*b).step_by(*st).collect()),
        _ => Err(usage(format!("bad grid {s:?}, expected start:end:step"))),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let p = prepare(&a.data)?;
    let grid: Vec<NeighborParams> = match (&a.grid, a.auto_grid) {
        (Some(g), _) => parse_grid(g)?
            .into_iter()
            .map(|b| NeighborParams::new(b, a.step_size).map_err(|e| usage(e.to_string())))
            .collect::<Result<_>>()?,
        (None, true) => default_grid(p.x.n_rows()),
        (None, false) => return Err(usage("one of --grid or --auto-grid is required")),
    };
    let alg = match a.algo {
        SweepAlgo::Crad => SweepAlgorithm::Crad,
        SweepAlgo::CradDbscan => SweepAlgorithm::CradDbscan {
            min_pts: a
                .min_pts
                .ok_or_else(|| usage("crad-dbscan requires --min-pts"))?,
        },
    };
    let res = sweep_nbin(&p.x, alg, &grid, a.data.seed, &p.options)?;
    if let Some(path) = &a.labels {
        write_labels(path, &res.best_labels)?;
    }
    let json = serde_json::to_string_pretty(&res)?;
    match &a.out {
        Some(path) => write_string(path, &(json + "\n"))?,
        None => println!("{json}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalOutput {
    n: usize,
    noise_mode: &'static str,
    ri: f64,
    ami: f64,
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let labels = read_label_file(&a.labels)?;
    let truth = read_label_file(&a.truth)?;
    let (mode, name) = match a.noise_mode {
        NoiseModeArg::OneCluster => (NoiseMode::OneCluster, "one-cluster"),
        NoiseModeArg::Singletons => (NoiseMode::Singletons, "singletons"),
    };
    let out = EvalOutput {
        n: labels.len(),
        noise_mode: name,
        ri: rand_index_with(&labels, &truth, mode)?,
        ami: ami_with(&labels, &truth, mode)?,
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let text =
        fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut config: BenchConfig =
        serde_json::from_str(&text).map_err(|e| usage(format!("bad bench config: {e}")))?;
    if let Some(t) = a.trials {
        config.trials = t;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let base = a.config.parent().unwrap_or(Path::new("."));
    let report = run_bench(&config, base)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    write_string(&a.out_dir.join("bench.csv"), &rows_to_csv(&report.rows))?;
    write_string(
        &a.out_dir.join("bench.json"),
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )?;
    println!("dataset,algorithm,best_ri,ri_mode,best_ami,ami_mode");
    for s in &report.summary {
        println!(
            "{},{},{:.4},{},{:.4},{}",
            s.dataset, s.algorithm, s.best_ri, s.best_ri_mode, s.best_ami, s.best_ami_mode
        );
    }
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let input = load_input(&a.input, TruthColumn::Auto)?;
    let labels = read_label_file(&a.labels)?;
    if labels.len() != input.x.n_rows() {
        anyhow::bail!(
            "{} has {} rows but {} has {} labels",
            a.input.display(),
            input.x.n_rows(),
            a.labels.display(),
            labels.len()
        );
    }
    let cols: Vec<usize> = a
        .cols
        .split(',')
        .map(|c| c.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("bad --cols {:?}", a.cols)))?;
    let p = input.x.n_cols();
    let pair = match cols.as_slice() {
        [i, j] if *i < p && *j < p => (*i, *j),
        _ => return Err(usage(format!("--cols needs two indices below {p}"))),
    };
    write_string(&a.out, &svg::scatter(&input.x, &labels, pair))?;
    println!("{}", a.out.display());
    Ok(())
}
