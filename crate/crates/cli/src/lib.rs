//! Experiment drivers behind the `vlbm` command-line tool.
//!
//! Each experiment has a parameter struct built from [`config::Settings`],
//! a pure `run` function returning in-memory results, and a writer that
//! emits CSV files. Every CSV starts with a `# vlbm <command> key=value ..`
//! line recording the full parameter set.

pub mod config;
pub mod experiments;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;
use vlbm_core::VlbmError;

pub use config::Settings;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(VlbmError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<VlbmError> for CliError {
    fn from(e: VlbmError) -> Self {
        match e {
            VlbmError::InvalidParameter(_)
            | VlbmError::Configuration(_)
            | VlbmError::Unsupported(_)
            | VlbmError::SingularCoefficient(_) => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The entropy monitor saw the entropy increase.
    EntropyIncreased,
    /// A run that was expected to stay bounded diverged.
    Diverged,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::EntropyIncreased => 1,
            Outcome::Diverged => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ConvergenceD1q2,
    StabilityD2q4,
    Region,
    EntropyMonitor,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ConvergenceD1q2 => "convergence-d1q2",
            Command::StabilityD2q4 => "stability-d2q4",
            Command::Region => "region",
            Command::EntropyMonitor => "entropy-monitor",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        [
            Command::ConvergenceD1q2,
            Command::StabilityD2q4,
            Command::Region,
            Command::EntropyMonitor,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| CliError::Config(format!("unknown command {s:?}")))
    }
}

/// The `# vlbm <command> key=value ...` first line of every CSV.
pub fn manifest_line(command: Command, pairs: &[(&str, String)]) -> String {
    let mut line = format!("# vlbm {command}");
    for (k, v) in pairs {
        line.push_str(&format!(" {k}={v}"));
    }
    line
}

/// Creates `dir/name` and writes the manifest line.
pub(crate) fn create_csv(
    dir: &Path,
    name: &str,
    manifest: &str,
) -> Result<BufWriter<File>, CliError> {
    let mut out = BufWriter::new(File::create(dir.join(name))?);
    writeln!(out, "{manifest}")?;
    Ok(out)
}

/// Formats a list for the manifest (`1.2;1.6;2`, semicolons keep the line splittable on spaces and commas).
pub(crate) fn join_list<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Runs `command` with `settings`, writing CSV files into `out`.
pub fn run_command(command: Command, settings: &Settings, out: &Path) -> Result<Outcome, CliError> {
    use experiments::*;
    match command {
        Command::ConvergenceD1q2 => {
            let params = ConvergenceParams::from_settings(settings)?;
            prepare_out(out)?;
            let results = params.run()?;
            params.write(&results, out)?;
            Ok(if results.rows.iter().any(|r| r.diverged) {
                Outcome::Diverged
            } else {
                Outcome::Success
            })
        }
        Command::StabilityD2q4 => {
            let params = StabilityParams::from_settings(settings)?;
            prepare_out(out)?;
            let runs = params.run()?;
            params.write(&runs, out)?;
            Ok(Outcome::Success)
        }
        Command::Region => {
            let params = RegionParams::from_settings(settings)?;
            prepare_out(out)?;
            let rasters = params.run()?;
            params.write(&rasters, out)?;
            Ok(Outcome::Success)
        }
        Command::EntropyMonitor => {
            let params = EntropyParams::from_settings(settings)?;
            prepare_out(out)?;
            let result = params.run()?;
            params.write(&result, out)?;
            Ok(if result.divergence.is_some() {
                Outcome::Diverged
            } else if result.non_increasing {
                Outcome::Success
            } else {
                Outcome::EntropyIncreased
            })
        }
    }
}

fn prepare_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| {
        CliError::Config(format!(
            "cannot create output directory {}: {e}",
            out.display()
        ))
    })
}
