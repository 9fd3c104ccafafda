//! Input sniffing, label files and dataset fingerprints.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use crad::dataset::{read_csv, CsvOptions};
use crad::{DataMatrix, Labels};
use sha2::{Digest, Sha256};

/// Which input column, if any, carries ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthColumn {
    /// A header cell named `label` (case-insensitive), if present.
    Auto,
    None,
    Last,
    Index(usize),
}

impl FromStr for TruthColumn {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self::Auto),
            "none" => Ok(Self::None),
            "last" => Ok(Self::Last),
            _ => s
                .parse()
                .map(Self::Index)
                .map_err(|_| format!("expected auto, none, last or a column index, got {s:?}")),
        }
    }
}

pub struct Input {
    pub x: DataMatrix,
    pub truth: Option<Labels>,
    /// Lowercase hex SHA-256 of the file bytes.
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn first_record(text: &str) -> Option<Vec<&str>> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::trim).collect())
}

/// A first row with any non-numeric cell is a header.
pub fn has_header(text: &str) -> bool {
    first_record(text).is_some_and(|cells| cells.iter().any(|c| c.parse::<f64>().is_err()))
}

pub fn load_input(path: &Path, truth: TruthColumn) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text =
        std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let header = has_header(text);
    let cells = first_record(text).unwrap_or_default();
    let label_column = match truth {
        TruthColumn::None => None,
        TruthColumn::Last => Some(cells.len().saturating_sub(1)),
        TruthColumn::Index(i) => Some(i),
        TruthColumn::Auto if header => cells.iter().position(|c| c.eq_ignore_ascii_case("label")),
        TruthColumn::Auto => None,
    };
    let options = CsvOptions {
        has_header: header,
        label_column,
        ..CsvOptions::default()
    };
    let (x, truth) = read_csv(bytes.as_slice(), &options)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(Input {
        x,
        truth,
        sha256: sha256_hex(&bytes),
    })
}

/// Labels from the last column of a CSV (header optional).
pub fn read_label_file(path: &Path) -> Result<Labels> {
    let input = load_input(path, TruthColumn::Last)?;
    match input.truth {
        Some(l) => Ok(l),
        None => bail!("{} has no label column", path.display()),
    }
}

/// `row_index,label` CSV.
pub fn write_labels(path: &Path, labels: &Labels) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "row_index,label")?;
    for (i, l) in labels.as_slice().iter().enumerate() {
        writeln!(out, "{i},{l}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
