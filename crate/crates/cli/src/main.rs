use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pue_cli::{load, run, CliError, Format, RunOptions, TASKS};

#[derive(Parser)]
#[command(name = "pue", version, about = "Entropy and pressure of partitions of unity, driven by a config file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task described by a spec and write one artifact.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Single-threaded, bit-reproducible evaluation.
        #[arg(long)]
        serial: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check a spec without computing anything.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Print the available task names.
    ListTasks,
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out, format, serial, budget } => {
            let options = RunOptions { format, serial, budget };
            match load(&spec).and_then(|s| run(&s, &out, &options)) {
                Ok(path) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => report(&e),
            }
        }
        Command::Validate { spec } => match load(&spec).and_then(|s| s.resolve().map(|_| ())) {
            Ok(()) => {
                println!("ok: {}", spec.display());
                ExitCode::SUCCESS
            }
            Err(e) => report(&e),
        },
        Command::ListTasks => {
            for t in TASKS {
                println!("{t}");
            }
            ExitCode::SUCCESS
        }
    }
}
