use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use otob_cli::{execute_bounds, execute_replay, execute_run, load_config, resolve, CliError};

#[derive(Parser)]
#[command(name = "otob", version, about = "Offline-to-online bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run synthetic-instance experiments and write per-policy regret CSVs
    Run(CommonArgs),
    /// Tabulate the theoretical bound curves for the configured counts
    Bounds(CommonArgs),
    /// Run reward-table replay experiments
    Replay(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the experiment config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override run.seed from the config
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(command: Command) -> Result<(), CliError> {
    let (args, runner): (&CommonArgs, fn(&otob_cli::ResolvedConfig) -> _) = match &command {
        Command::Run(args) => (args, execute_run),
        Command::Bounds(args) => (args, execute_bounds),
        Command::Replay(args) => (args, execute_replay),
    };
    let base_dir = args
        .config
        .parent()
        .map(PathBuf::from)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));
    let file = load_config(&args.config)?;
    let cfg = resolve(file, &base_dir, args.seed)?;
    let output = runner(&cfg)?;
    for file in output.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
