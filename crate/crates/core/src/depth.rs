//! Robust Mahalanobis depth between every pair of observations.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dataset::DataMatrix;
use crate::error::{Error, Result};
use crate::robust_scatter::{mahalanobis_sq, ScatterEstimate};

const CACHE_MAGIC: &[u8; 8] = b"CRADDM01";

/// `1 / (1 + (xj - xi)^T inv (xj - xi))`.
pub fn depth_value(xi: &[f64], xj: &[f64], inv_cov: &DMatrix<f64>) -> f64 {
    let diff: Vec<f64> = xj.iter().zip(xi).map(|(a, b)| a - b).collect();
    1.0 / (1.0 + mahalanobis_sq(&diff, inv_cov))
}

/// Dense `n x n` matrix with `D[i][j]` the depth of `x_j` relative to `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DepthMatrix {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Depths of every observation relative to `x_i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Binary cache: `CRADDM01`, little-endian `u64` n, then `n^2` little-endian f64, row-major.
    pub fn write_cache<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&(self.n as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.n * 8);
        for row in self.values.chunks(self.n.max(1)) {
            buf.clear();
            for v in row {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        out.flush()
    }

    pub fn read_cache<R: Read>(mut input: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::DepthCache(e.to_string());
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(io)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::DepthCache("bad magic bytes".into()));
        }
        let mut word = [0u8; 8];
        input.read_exact(&mut word).map_err(io)?;
        let n = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| Error::DepthCache("size overflow".into()))?;
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Error::DepthCache("size overflow".into()))?;
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            input.read_exact(&mut word).map_err(io)?;
            values.push(f64::from_le_bytes(word));
        }
        let mut rest = [0u8; 1];
        if input.read(&mut rest).map_err(io)? != 0 {
            return Err(Error::DepthCache("trailing bytes".into()));
        }
        Ok(Self { n, values })
    }
}

/// Depth of every observation with respect to every other one, under one global scatter.
///
/// Rows are filled in parallel; each entry only depends on its own pair, so the
/// result is identical for any thread count.
pub fn depth_matrix(x: &DataMatrix, scatter: &ScatterEstimate) -> Result<DepthMatrix> {
    if scatter.dim() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: x.n_cols(),
            found: scatter.dim(),
        });
    }
    Ok(depth_matrix_with_inverse(x, &scatter.inverse))
}

pub(crate) fn depth_matrix_with_inverse(x: &DataMatrix, inv: &DMatrix<f64>) -> DepthMatrix {
    let (n, p) = (x.n_rows(), x.n_cols());
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
        let xi = x.row(i);
        let mut diff = vec![0.0; p];
        for (j, slot) in out.iter_mut().enumerate() {
            if i == j {
                *slot = 1.0;
                continue;
            }
            for (k, d) in diff.iter_mut().enumerate() {
                *d = x.get(j, k) - xi[k];
            }
            *slot = 1.0 / (1.0 + mahalanobis_sq(&diff, inv));
        }
    });
    DepthMatrix { n, values }
}

/// Depth matrix of a single observation.
pub fn singleton() -> DepthMatrix {
    DepthMatrix {
        n: 1,
        values: vec![1.0],
    }
}
