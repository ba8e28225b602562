use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xyz_cli::commands::{bench, export, import, lasso, search};
use xyz_cli::CliError;

/// Search for strong pairwise interactions and fit interaction Lasso paths.
#[derive(Parser, Debug)]
#[command(name = "xyz", version)]
struct Cli {
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long, env = "XYZ_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a CSV with a header row into a dataset file.
    Import(import::ImportArgs),
    /// Write a dataset file back out as CSV.
    Export(export::ExportArgs),
    /// Find pairs (j, k) whose product X_j X_k matches the response.
    Search(search::SearchArgs),
    /// Fit a Lasso path over main effects and all pairwise products.
    Lasso(lasso::LassoArgs),
    /// Produce benchmark tables.
    Bench(bench::BenchArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Import(a) => import::run(a),
        Command::Export(a) => export::run(a),
        Command::Search(a) => search::run(a),
        Command::Lasso(a) => lasso::run(a),
        Command::Bench(a) => bench::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
