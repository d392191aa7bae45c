use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ccdm_cli::selftest::{self, Config, STREAMING};
use ccdm_cli::{
    cmd_decode, cmd_encode, cmd_quantize, cmd_sweep, parse_format, CliError, CliResult, Outcome,
};
use clap::{Parser, Subcommand};

/// Constant composition distribution matcher.
#[derive(Parser)]
#[command(name = "ccdm", version)]
struct Cli {
    /// Machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the n-type and code parameters for a target distribution
    Quantize {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Map each m-bit block of a bit file to a symbol block
    Encode {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map each symbol block of a symbol file back to its bit block
    Decode {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Decode non-codewords with the floor map instead of rejecting them
        #[arg(long)]
        lenient: bool,
    },
    /// Rate and divergence report over a range of blocklengths
    Sweep {
        #[arg(long)]
        dist: PathBuf,
        /// `preset` or a comma-separated list of blocklengths
        #[arg(long, default_value = "preset")]
        grid: String,
        /// csv or json
        #[arg(long, default_value = "csv")]
        format: String,
        /// Report file; stdout if absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the streaming coder against the reference coder
    Selftest {
        #[arg(long, default_value_t = 12)]
        max_n: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn print(outcome: &Outcome, json: bool) {
    if json {
        println!("{}", outcome.json);
    } else {
        println!("{}", outcome.text);
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    let json = cli.json;
    match cli.command {
        Command::Quantize { dist, n } => print(&cmd_quantize(&dist, n)?, json),
        Command::Encode {
            dist,
            n,
            input,
            out,
        } => print(&cmd_encode(&dist, n, &input, &out)?, json),
        Command::Decode {
            dist,
            n,
            input,
            out,
            lenient,
        } => {
            let outcome = cmd_decode(&dist, n, &input, &out, lenient)?;
            match outcome.json["warnings"].as_u64() {
                Some(w) if w > 0 => eprintln!("warning: {w} blocks were not codewords"),
                _ => {}
            }
            print(&outcome, json);
        }
        Command::Sweep {
            dist,
            grid,
            format,
            out,
        } => {
            let format = parse_format(&format)?;
            let mut stdout = io::stdout().lock();
            let outcome = cmd_sweep(&dist, &grid, format, out.as_deref(), &mut stdout)?;
            stdout.flush().map_err(|e| CliError::Io(e.to_string()))?;
            if out.is_some() {
                print(&outcome, json);
            }
        }
        Command::Selftest {
            max_n,
            trials,
            seed,
        } => {
            let report = selftest::run(
                &Config {
                    max_n,
                    trials,
                    seed,
                },
                STREAMING,
            );
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.table());
            }
            return Ok(report.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ccdm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
