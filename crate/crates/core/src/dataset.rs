//! Observation matrices, label vectors, CSV ingestion and column standardization.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Dense `n x p` matrix of finite reals, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values.
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "shape {n_rows}x{n_cols} must be at least 1x1"
            )));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::InvalidMatrix(format!(
                "{} values for shape {n_rows}x{n_cols}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at row {}, col {}",
                pos / n_cols,
                pos % n_cols
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), n_cols, values)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols)
    }

    /// Row-major view of every entry.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Rows gathered in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            n_rows: indices.len(),
            n_cols: self.n_cols,
            values,
        }
    }

    /// Applies `x -> A x + b` to every row; `a` is `p x p` row-major.
    pub fn affine(&self, a: &[f64], b: &[f64]) -> Self {
        let p = self.n_cols;
        assert_eq!(a.len(), p * p);
        assert_eq!(b.len(), p);
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            for r in 0..p {
                let dot: f64 = (0..p).map(|c| a[r * p + c] * row[c]).sum();
                values.push(dot + b[r]);
            }
        }
        Self {
            n_rows: self.n_rows,
            n_cols: p,
            values,
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &DataMatrix) -> Result<Self> {
        if other.n_cols != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: other.n_cols,
            });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(Self {
            n_rows: self.n_rows + other.n_rows,
            n_cols: self.n_cols,
            values,
        })
    }
}

/// Label assigned to points that were never reached (intermediate state only).
pub const UNASSIGNED: i64 = -1;
/// Label shared by singletons and noise.
pub const NOISE: i64 = 0;

/// Per-point cluster assignment: `-1` unassigned, `0` singleton/noise, `>= 1` cluster id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labels(Vec<i64>);

impl Labels {
    pub fn new(labels: Vec<i64>) -> Self {
        Self(labels)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    /// Number of distinct cluster ids `>= 1`.
    pub fn n_clusters(&self) -> usize {
        let mut ids: Vec<i64> = self.0.iter().copied().filter(|&l| l >= 1).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    pub fn noise_count(&self) -> usize {
        self.0.iter().filter(|&&l| l == NOISE).count()
    }

    /// True when no entry is unassigned and cluster ids are exactly `1..=k`.
    pub fn is_final(&self) -> bool {
        if self.0.iter().any(|&l| l < 0) {
            return false;
        }
        let max = self.0.iter().copied().max().unwrap_or(0);
        max as usize == self.n_clusters()
    }

    /// Renumbers ids `>= 1` by order of first appearance; `0` and `-1` are kept.
    pub fn renumbered(&self) -> Self {
        let mut map = HashMap::new();
        let out = self
            .0
            .iter()
            .map(|&l| {
                if l < 1 {
                    l
                } else {
                    let next = map.len() as i64 + 1;
                    *map.entry(l).or_insert(next)
                }
            })
            .collect();
        Self(out)
    }

    /// Labels reordered so that entry `k` is `self[indices[k]]`.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self(indices.iter().map(|&i| self.0[i]).collect())
    }
}

impl From<Vec<i64>> for Labels {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl std::ops::Index<usize> for Labels {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub label_column: Option<usize>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            label_column: None,
        }
    }
}

/// Maps raw label cells to ids: integer `0` stays noise, every other value
/// gets the next id by order of first appearance.
#[derive(Default)]
struct LabelMapper {
    seen: HashMap<String, i64>,
}

impl LabelMapper {
    fn map(&mut self, cell: &str) -> i64 {
        if cell.parse::<i64>() == Ok(0) {
            return NOISE;
        }
        let next = self.seen.len() as i64 + 1;
        *self.seen.entry(cell.to_string()).or_insert(next)
    }
}

/// Reads a numeric CSV, optionally splitting off a ground-truth label column.
pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<(DataMatrix, Option<Labels>)> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, options)
}

pub fn read_csv<R: std::io::Read>(
    reader: R,
    options: &CsvOptions,
) -> Result<(DataMatrix, Option<Labels>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut width = None;
    let mut n_rows = 0;
    let mut values = Vec::new();
    let mut mapper = LabelMapper::default();
    let mut labels = Vec::new();

    for record in rdr.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let line = record.position().map_or(n_rows + 1, |p| p.line() as usize);
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row: line,
                expected,
                found: record.len(),
            });
        }
        if let Some(lc) = options.label_column {
            if lc >= expected {
                return Err(Error::LabelColumn {
                    column: lc,
                    n_cols: expected,
                });
            }
        }
        for (c, cell) in record.iter().enumerate() {
            if Some(c) == options.label_column {
                labels.push(mapper.map(cell));
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::NonNumeric {
                        row: line,
                        col: c + 1,
                    })
                }
            }
        }
        n_rows += 1;
    }

    let width = width.ok_or(Error::EmptyFile)?;
    let n_cols = width - usize::from(options.label_column.is_some());
    if n_cols == 0 {
        return Err(Error::InvalidMatrix("no feature columns".into()));
    }
    let x = DataMatrix::new(n_rows, n_cols, values)?;
    let labels = options.label_column.map(|_| Labels::new(labels));
    Ok((x, labels))
}

/// Writes the matrix (and an optional trailing label column) as CSV with a header.
///
/// Values use the shortest representation that parses back to the same bits.
pub fn write_csv<W: Write>(mut out: W, x: &DataMatrix, labels: Option<&Labels>) -> Result<()> {
    let io = |source| Error::Io {
        path: "<output>".into(),
        source,
    };
    let mut header: Vec<String> = (0..x.n_cols()).map(|j| format!("x{}", j + 1)).collect();
    if labels.is_some() {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for (i, row) in x.rows().enumerate() {
        let mut line = row
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(",");
        if let Some(l) = labels {
            line.push(',');
            line.push_str(&l[i].to_string());
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

/// Centers each column and scales it to unit sample standard deviation (n-1 denominator).
/// Zero-variance columns are only centered.
pub fn standardize(x: &DataMatrix) -> Result<DataMatrix> {
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::InsufficientData(
            "standardize needs at least 2 rows".into(),
        ));
    }
    let p = x.n_cols();
    let mut means = vec![0.0; p];
    for row in x.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut sds = vec![0.0; p];
    for row in x.rows() {
        for j in 0..p {
            let d = row[j] - means[j];
            sds[j] += d * d;
        }
    }
    sds.iter_mut()
        .for_each(|s| *s = (*s / (n as f64 - 1.0)).sqrt());

    let values = x
        .rows()
        .flat_map(|row| {
            row.iter().enumerate().map(|(j, v)| {
                let c = v - means[j];
                if sds[j] > 0.0 {
                    c / sds[j]
                } else {
                    0.0
                }
            })
        })
        .collect();
    DataMatrix::new(n, p, values)
}
