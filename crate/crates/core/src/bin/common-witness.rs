use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use common_witness::cli::{self, Command, Format, RunConfig};

#[derive(Parser)]
#[command(name = "common-witness", version, about = "Common and Sidorenko linear equations over finite Abelian groups")]
struct Args {
    /// Group as a product of cyclic factors, e.g. Z5 or Z3xZ4.
    #[arg(short, long, global = true, default_value = "Z5")]
    group: String,
    /// Comma-separated coefficients, e.g. 1,1,-2.
    #[arg(short = 'L', long, global = true, default_value = "1,1,1", allow_hyphen_values = true)]
    equation: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Sub {
    /// Classify the equation and print margins.
    Classify,
    /// Build and certify an uncommon witness.
    Witness,
    /// Tabulate the phase function over one period.
    Sweep {
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
    /// Check Fourier identities on random functions.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Re-run a stored failure case.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_PARSE as u8 } else { 0 });
        }
    };
    let tolerance = match cli::tolerance_from_env() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(cli::EXIT_PARSE as u8);
        }
    };
    let command = match args.command {
        Sub::Classify => Command::Classify,
        Sub::Witness => Command::Witness,
        Sub::Sweep { samples } => Command::Sweep { samples },
        Sub::Verify { trials, replay } => Command::Verify { trials, replay },
    };
    let cfg = RunConfig {
        group: args.group,
        equation: args.equation,
        command,
        seed: args.seed,
        out: args.out,
        format: match args.format {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        },
        tolerance,
    };
    ExitCode::from(cli::execute(&cfg) as u8)
}
