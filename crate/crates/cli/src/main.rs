use std::path::PathBuf;
use std::process::ExitCode;

use basins_cli::{run_path, Overrides};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "basins", version, about = "Attractors and basin fractions of multistable systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run config (TOML, or JSON for `.json` files).
    Run {
        config: PathBuf,
        /// Worker threads for mapping and featurizing.
        #[arg(long)]
        workers: Option<usize>,
        /// Sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run {
        config,
        workers,
        seed,
        out,
    } = cli.command;
    let overrides = Overrides { workers, seed, out };
    match run_path(&config, &overrides) {
        Ok(report) => {
            println!("wrote {} files to {}", report.files.len(), report.output.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let basins_cli::CliError::Runtime { source, .. } = &e {
                for cause in source.chain().skip(1) {
                    eprintln!("  caused by: {cause}");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
