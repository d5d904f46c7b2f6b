//! `heunmcv <command> --in job.json [--out report.json] [--tol X] [--seed N]`

mod commands;
mod job;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use heunmcv::Error;

use commands::{Command, Overrides};
use job::JobSpec;

#[derive(Debug, Parser)]
#[command(name = "heunmcv", version, about = "Fuchsian systems, middle convolution and Heun integral transforms")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Job file (JSON); `-` reads standard input.
    #[arg(long = "in")]
    input: PathBuf,
    /// Report file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Theorem id for `verify-integral`.
    #[arg(long)]
    theorem: Option<String>,
}

fn read_job(path: &PathBuf) -> Result<JobSpec, Error> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    }
    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    JobSpec::parse(&text)
}

fn write_out(path: Option<&PathBuf>, value: &serde_json::Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match path {
        Some(p) => std::fs::write(p, text + "\n"),
        None => writeln!(std::io::stdout(), "{text}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ov = Overrides { tol: cli.tol, seed: cli.seed, theorem: cli.theorem.clone() };
    let outcome = read_job(&cli.input).and_then(|job| commands::run(cli.command, &job, &ov));
    match outcome {
        Ok(o) => {
            if let Err(e) = write_out(cli.out.as_ref(), &o.output) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(1);
            }
            match o.failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e @ (Error::VerificationFailure { .. } | Error::ConsistencyFailure(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
