pub mod bench;
pub mod export;
pub mod import;
pub mod lasso;
pub mod search;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliResult;
use crate::manifest::{manifest_path, RunManifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

/// `auto` or a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Count {
    Auto,
    Fixed(usize),
}

impl Count {
    pub fn fixed(self) -> Option<usize> {
        match self {
            Count::Auto => None,
            Count::Fixed(v) => Some(v),
        }
    }
}

pub fn parse_count(s: &str) -> Result<Count, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Count::Auto);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected 'auto' or a positive integer, got '{s}'")),
        Ok(v) => Ok(Count::Fixed(v)),
    }
}

/// Fills in timing and the output digest, then writes the manifest if a
/// location is known.
pub(crate) fn finish(
    mut manifest: RunManifest,
    start: Instant,
    output: Option<&PathBuf>,
    explicit: Option<&PathBuf>,
) -> CliResult<()> {
    manifest.wall_time_secs = start.elapsed().as_secs_f64();
    if let Some(out) = output {
        manifest.add_output(out)?;
    }
    if let Some(path) = manifest_path(explicit.map(PathBuf::as_path), output.map(PathBuf::as_path)) {
        manifest.write(&path)?;
        eprintln!("manifest: {}", path.display());
    }
    Ok(())
}

pub(crate) fn digest_inputs(manifest: &mut RunManifest, inputs: &[&Path]) -> CliResult<()> {
    for p in inputs {
        manifest.add_input(p)?;
    }
    Ok(())
}
