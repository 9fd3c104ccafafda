//! Seeded synthetic data: the three-blob varying-density toy set, cassini,
//! spirals and Gaussian blobs, their mixture, and noise injection.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` with a
//! dedicated stream per stage (see the `STREAM_*` constants), so outputs are
//! pure functions of the arguments and independent of thread scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{DataMatrix, Labels, NOISE};
use crate::error::{Error, Result};

pub const STREAM_GAUSSIANS: u64 = 1;
pub const STREAM_CASSINI: u64 = 2;
pub const STREAM_SPIRALS: u64 = 3;
pub const STREAM_UNIFORM_NOISE: u64 = 4;
pub const STREAM_GAUSSIAN_NOISE: u64 = 5;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Isotropic Gaussian blobs; blob `k` gets label `k + 1`.
pub fn gen_gaussians(
    centers: &[Vec<f64>],
    scales: &[f64],
    counts: &[usize],
    seed: u64,
) -> Result<(DataMatrix, Labels)> {
    gaussians_from(&mut rng(seed, STREAM_GAUSSIANS), centers, scales, counts)
}

fn gaussians_from(
    r: &mut ChaCha8Rng,
    centers: &[Vec<f64>],
    scales: &[f64],
    counts: &[usize],
) -> Result<(DataMatrix, Labels)> {
    if centers.is_empty() || centers.len() != scales.len() || centers.len() != counts.len() {
        return Err(Error::InvalidParameter(
            "centers, scales and counts must be non-empty and of equal length".into(),
        ));
    }
    let p = centers[0].len();
    if p == 0 || centers.iter().any(|c| c.len() != p) {
        return Err(Error::InvalidParameter(
            "centers must share one dimension >= 1".into(),
        ));
    }
    if scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter("scales must be positive".into()));
    }
    if counts.contains(&0) {
        return Err(Error::InvalidParameter("counts must be >= 1".into()));
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (k, ((c, &s), &m)) in centers.iter().zip(scales).zip(counts).enumerate() {
        for _ in 0..m {
            for &cj in c {
                let z: f64 = r.sample(StandardNormal);
                values.push(cj + s * z);
            }
            labels.push(k as i64 + 1);
        }
    }
    Ok((
        DataMatrix::new(labels.len(), p, values)?,
        Labels::new(labels),
    ))
}

/// Two dense unit-scale blobs of 60 points, 4 apart, and a diffuse blob of
/// 200 points with scale 6 whose center is 20 units from the first.
pub fn gen_toy(seed: u64) -> (DataMatrix, Labels) {
    gen_gaussians(
        &[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 20.0]],
        &[1.0, 1.0, 6.0],
        &[60, 60, 200],
        seed,
    )
    .expect("fixed recipe is valid")
}

/// Class sizes `2:1:2` of `n`, rounded, summing to `n`.
pub fn cassini_sizes(n: usize) -> [usize; 3] {
    let a = (0.4 * n as f64).round() as usize;
    let b = (0.2 * n as f64).round() as usize;
    [a, b, n - a - b]
}

/// Two banana-shaped lobes (labels 1 and 3) around a small central disk (label 2).
pub fn gen_cassini(n: usize, seed: u64) -> Result<(DataMatrix, Labels)> {
    let sizes = cassini_sizes(n);
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "cassini needs n >= 3 so every class is non-empty, got {n}"
        )));
    }
    let mut r = rng(seed, STREAM_CASSINI);
    let mut values = Vec::with_capacity(2 * n);
    let (r_in, r_out) = (2.3f64, 2.9f64);
    let (a_lo, a_hi) = (50f64.to_radians(), 130f64.to_radians());
    let lobe = |r: &mut ChaCha8Rng, cy: f64, sign: f64, out: &mut Vec<f64>| {
        let angle = r.random_range(a_lo..a_hi);
        let rad = r.random_range(r_in * r_in..r_out * r_out).sqrt();
        out.push(rad * angle.cos());
        out.push(cy + sign * rad * angle.sin());
    };
    for _ in 0..sizes[0] {
        lobe(&mut r, -1.5, 1.0, &mut values);
    }
    for _ in 0..sizes[1] {
        let angle = r.random_range(0.0..2.0 * PI);
        let rad = 0.5 * r.random::<f64>().sqrt();
        values.push(rad * angle.cos());
        values.push(rad * angle.sin());
    }
    for _ in 0..sizes[2] {
        lobe(&mut r, 1.5, -1.0, &mut values);
    }
    let labels: Vec<i64> = (1..=3)
        .zip(sizes)
        .flat_map(|(l, k)| std::iter::repeat_n(l, k))
        .collect();
    Ok((DataMatrix::new(n, 2, values)?, Labels::new(labels)))
}

/// Point `k` of an `m`-point spiral arm: `t = (k + 1) / m`,
/// `(t cos(2 pi turns t), t sin(2 pi turns t))`.
pub fn spiral_point(k: usize, m: usize, turns: f64) -> [f64; 2] {
    let t = (k + 1) as f64 / m as f64;
    let a = 2.0 * PI * turns * t;
    [t * a.cos(), t * a.sin()]
}

/// Two interleaved spirals; the second arm is the first rotated by half a turn.
/// The first arm holds `ceil(n / 2)` points.
pub fn gen_spirals(n: usize, turns: f64, sd: f64, seed: u64) -> Result<(DataMatrix, Labels)> {
    if n < 2 {
        return Err(Error::InvalidParameter("spirals need n >= 2".into()));
    }
    if !(turns > 0.0 && turns.is_finite()) || !(sd >= 0.0 && sd.is_finite()) {
        return Err(Error::InvalidParameter(
            "turns must be positive and sd non-negative".into(),
        ));
    }
    let mut r = rng(seed, STREAM_SPIRALS);
    let arms = [n.div_ceil(2), n / 2];
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for (c, &m) in arms.iter().enumerate() {
        let sign = if c == 0 { 1.0 } else { -1.0 };
        for k in 0..m {
            let pt = spiral_point(k, m, turns);
            for v in pt {
                let z: f64 = if sd > 0.0 {
                    r.sample(StandardNormal)
                } else {
                    0.0
                };
                values.push(sign * v + sd * z);
            }
            labels.push(c as i64 + 1);
        }
    }
    Ok((DataMatrix::new(n, 2, values)?, Labels::new(labels)))
}

/// Two Gaussian blobs of different spread, a cassini set and a pair of spirals,
/// placed side by side (7 classes, 700 points).
pub fn gen_mixture(seed: u64) -> (DataMatrix, Labels) {
    let (g, gl) = gen_gaussians(
        &[vec![0.0, 0.0], vec![4.0, 0.0]],
        &[0.35, 0.7],
        &[150, 150],
        seed,
    )
    .expect("fixed recipe is valid");
    let (c, cl) = gen_cassini(250, seed).expect("fixed recipe is valid");
    let (s, sl) = gen_spirals(150, 1.0, 0.03, seed).expect("fixed recipe is valid");

    let c = c.affine(&[1.0, 0.0, 0.0, 1.0], &[12.0, 0.0]);
    let s = s.affine(&[3.0, 0.0, 0.0, 3.0], &[4.0, 10.0]);
    let x = g.vstack(&c).and_then(|m| m.vstack(&s)).expect("same width");
    let mut labels = gl.into_vec();
    labels.extend(cl.as_slice().iter().map(|l| l + 2));
    labels.extend(sl.as_slice().iter().map(|l| l + 5));
    (x, Labels::new(labels))
}

/// Appends `round(ratio * n)` points drawn uniformly from the bounding box of `x`
/// widened by 5% of its extent (2.5% on each side), labeled `0`.
pub fn add_uniform_noise(
    x: &DataMatrix,
    labels: &Labels,
    ratio: f64,
    seed: u64,
) -> Result<(DataMatrix, Labels)> {
    if labels.len() != x.n_rows() {
        return Err(Error::LengthMismatch(x.n_rows(), labels.len()));
    }
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::InvalidParameter(format!(
            "noise ratio must lie in [0, 1), got {ratio}"
        )));
    }
    let extra = (ratio * x.n_rows() as f64).round() as usize;
    if extra == 0 {
        return Ok((x.clone(), labels.clone()));
    }
    let p = x.n_cols();
    let bounds: Vec<(f64, f64)> = (0..p)
        .map(|j| {
            let col = x.column(j);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let pad = 0.025 * (hi - lo);
            (lo - pad, hi + pad)
        })
        .collect();
    let mut r = rng(seed, STREAM_UNIFORM_NOISE);
    let mut values = Vec::with_capacity(extra * p);
    for _ in 0..extra {
        for &(lo, hi) in &bounds {
            values.push(if hi > lo { r.random_range(lo..hi) } else { lo });
        }
    }
    let noise = DataMatrix::new(extra, p, values)?;
    let mut out = labels.clone().into_vec();
    out.extend(std::iter::repeat_n(NOISE, extra));
    Ok((x.vstack(&noise)?, Labels::new(out)))
}

/// How the magnitude argument of [`add_gaussian_noise`] is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseScale {
    #[default]
    StdDev,
    Variance,
}

/// Adds i.i.d. zero-mean Gaussian noise to every entry.
pub fn add_gaussian_noise(
    x: &DataMatrix,
    magnitude: f64,
    scale: NoiseScale,
    seed: u64,
) -> Result<DataMatrix> {
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(Error::InvalidParameter(
            "noise magnitude must be >= 0".into(),
        ));
    }
    let sd = match scale {
        NoiseScale::StdDev => magnitude,
        NoiseScale::Variance => magnitude.sqrt(),
    };
    if sd == 0.0 {
        return Ok(x.clone());
    }
    let mut r = rng(seed, STREAM_GAUSSIAN_NOISE);
    let values = x
        .as_slice()
        .iter()
        .map(|v| {
            let z: f64 = r.sample(StandardNormal);
            v + sd * z
        })
        .collect();
    DataMatrix::new(x.n_rows(), x.n_cols(), values)
}

/// Generator recipe, as read from the command line or a JSON config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "kebab-case")]
pub enum Recipe {
    Toy,
    Gaussians {
        centers: Vec<Vec<f64>>,
        scales: Vec<f64>,
        counts: Vec<usize>,
    },
    Cassini {
        n: usize,
    },
    Spirals {
        n: usize,
        turns: f64,
        sd: f64,
    },
    Mixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub recipe: Recipe,
    pub seed: u64,
    /// Uniform background noise, as a fraction of the generated point count.
    #[serde(default)]
    pub noise_ratio: f64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<(DataMatrix, Labels)> {
        let s = self.seed;
        let (x, labels) = match &self.recipe {
            Recipe::Toy => gen_toy(s),
            Recipe::Gaussians {
                centers,
                scales,
                counts,
            } => gen_gaussians(centers, scales, counts, s)?,
            Recipe::Cassini { n } => gen_cassini(*n, s)?,
            Recipe::Spirals { n, turns, sd } => gen_spirals(*n, *turns, *sd, s)?,
            Recipe::Mixture => gen_mixture(s),
        };
        add_uniform_noise(&x, &labels, self.noise_ratio, s)
    }
}
