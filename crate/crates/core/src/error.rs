use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty file")]
    EmptyFile,

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-numeric cell at row {row}, col {col}")]
    NonNumeric { row: usize, col: usize },

    #[error("label column {column} out of range for {n_cols} columns")]
    LabelColumn { column: usize, n_cols: usize },

    #[error("invalid data matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact fit / degenerate scatter")]
    DegenerateScatter,

    #[error("reweighting collapse: every observation received weight zero")]
    ReweightingCollapse,

    #[error("combinatorial budget exceeded: C({n}, {h}) > {budget}")]
    CombinatorialBudget { n: usize, h: usize, budget: u64 },

    #[error("depth {0} outside (0, 1]")]
    DepthOutOfRange(f64),

    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("CH undefined: {0}")]
    ChUndefined(String),

    #[error("no valid clustering in grid")]
    NoValidClustering,

    #[error("bad depth cache: {0}")]
    DepthCache(String),
}
