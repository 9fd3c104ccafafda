//! Command-line front end for the `crad` clustering library.

pub mod bench;
pub mod commands;
pub mod io;
pub mod report;
pub mod svg;

/// Missing or inconsistent command-line arguments; reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);
