//! Command-line front end for `takagi-core`.
//!
//! Every subcommand writes its artifacts to files, a `.run.json` sidecar next
//! to the main artifact, and one JSON summary line to standard output.
//! Exit status is 0 on success, 1 when a check fails and 2 on usage errors.

// `!(a < b)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
mod commands;
pub mod verify;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] takagi_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a subcommand hands back: its summary and whether its checks held.
pub struct Outcome {
    pub summary: Value,
    pub passed: bool,
}

/// Run metadata written beside each artifact.
#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub depth: Option<u32>,
    pub truncation: Option<u32>,
    pub n_samples: Option<u64>,
    pub wall_ms: u128,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("run.json")
}

pub(crate) fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    f(&mut w).and_then(|()| w.flush()).map_err(io_err)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_file(path, |w| writeln!(w, "{text}"))
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("TAKAGI_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("TAKAGI_THREADS={v:?} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let result = thread_pool().and_then(|pool| pool.install(|| commands::dispatch(&cli, start)));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
