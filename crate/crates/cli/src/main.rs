use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vlbm_cli::{run_command, CliError, Command, Settings};

/// Vectorial lattice-Boltzmann experiments.
///
/// Parameters come from an optional `key = value` file and from
/// `--key value` flags after the command; flags win.
#[derive(Parser)]
#[command(name = "vlbm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// D1Q2 error tables against the equivalent equation and system.
    ConvergenceD1q2(CommonArgs),
    /// D2Q4 Gaussian runs labelled stable / unstable.
    StabilityD2q4(CommonArgs),
    /// Diffusive and hyperbolic stability rasters.
    Region(CommonArgs),
    /// Entropy time series of D1Q2 transport.
    EntropyMonitor(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter overrides as `--key value` or `--key=value`.
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "--KEY VALUE"
    )]
    overrides: Vec<String>,
}

fn execute(command: Command, args: CommonArgs) -> Result<i32, CliError> {
    let mut flags = Settings::from_flags(&args.overrides)?;
    // `--out` / `--config` may also appear among the trailing overrides.
    let out = flags.remove("out").map(PathBuf::from).or(args.out);
    let config = flags.remove("config").map(PathBuf::from).or(args.config);
    let out = out.ok_or_else(|| CliError::Config("--out DIR is required".into()))?;
    let file = match config {
        Some(path) => Settings::from_file(&path)?,
        None => Settings::new(),
    };
    let settings = file.merged(flags);
    Ok(run_command(command, &settings, &out)?.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::ConvergenceD1q2(a) => (Command::ConvergenceD1q2, a),
        Cmd::StabilityD2q4(a) => (Command::StabilityD2q4, a),
        Cmd::Region(a) => (Command::Region, a),
        Cmd::EntropyMonitor(a) => (Command::EntropyMonitor, a),
    };
    let code = match execute(command, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("vlbm {command}: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
