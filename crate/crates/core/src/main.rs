use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use supercavity::cli::{self, CliError, CliResult, Format, OutputOptions};
use supercavity::verify::Level;

#[derive(Parser, Debug)]
#[command(
    name = "supercavity",
    version,
    about = "Single-photon scattering and quasi-bound states between two atomic mirrors"
)]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transmission and reflection over a k-grid.
    Spectrum(RunArgs),
    /// Perturbative and exact resonances for each mode.
    Resonances(RunArgs),
    /// Wavefunction of one state, or an Omega contour.
    Profile(RunArgs),
    /// Run the invariant suites.
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Configuration file of key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named built-in configuration, such as fig4a.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the generation time out of the header.
    #[arg(long)]
    no_timestamp: bool,
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

type Runner = fn(&cli::RunConfig, &OutputOptions) -> CliResult<String>;

fn run(args: Cli) -> CliResult<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    let (run_args, command): (RunArgs, Runner) = match args.command {
        Command::Verify { level } => {
            let (report, passed) = cli::cmd_verify(level);
            emit(&report, None)?;
            return Ok(passed);
        }
        Command::Spectrum(a) => (a, cli::cmd_spectrum),
        Command::Resonances(a) => (a, cli::cmd_resonances),
        Command::Profile(a) => (a, cli::cmd_profile),
    };
    let cfg = cli::load_config(run_args.config.as_deref(), run_args.preset.as_deref())?;
    let opts = OutputOptions {
        format: run_args.format,
        timestamp: !run_args.no_timestamp,
    };
    emit(&command(&cfg, &opts)?, run_args.out.as_ref())?;
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
