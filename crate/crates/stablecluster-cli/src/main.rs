//! `stablecluster`: generate, solve, probe and benchmark clustering instances.
//!
//! Exit codes: 0 success, 1 assertion failure (a failed manifest assertion or
//! an uncertifiable generator request), 2 usage, parse or other errors.

mod bench;
mod commands;
mod solvers;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};

use stablecluster::error::Error;

use crate::bench::{run_compare, run_suite, write_records};
use crate::commands::{emit, exact, gen, probe, solve, GenArgs, ProbeArgs, SolveArgs};
use crate::solvers::Algo;

#[derive(Parser, Debug)]
#[command(name = "stablecluster", version, about = "Clustering under perturbation resilience")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// Skip metric validation of input files.
    #[arg(long, global = true)]
    no_validate: bool,
    /// Worker threads for manifest rows.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance and its ground truth.
    Gen(GenArgs),
    /// Run one solver and write its clustering.
    Solve(SolveArgs),
    /// Run stability detectors and probes.
    Probe(ProbeArgs),
    /// Run several solvers on one instance and write CSV records.
    Compare {
        #[arg(short, long)]
        input: PathBuf,
        /// Ground-truth clustering file.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Solver and its parameters, e.g. "local-search epsilon=0.2"; repeatable.
        #[arg(long = "solver")]
        solvers: Vec<String>,
    },
    /// Run a manifest and write its report.
    Bench { manifest: PathBuf },
    /// Exhaustive optimum of a small instance.
    Exact {
        #[arg(short, long)]
        input: PathBuf,
    },
}

/// Raised when a manifest assertion fails.
#[derive(Debug)]
struct AssertionFailed(String);

impl std::fmt::Display for AssertionFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AssertionFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<AssertionFailed>() || matches!(cause.downcast_ref::<Error>(), Some(Error::Generator(_))) {
            return 1;
        }
    }
    2
}

fn parse_solver(spec: &str) -> Result<(Algo, String)> {
    let spec = spec.trim();
    let (name, params) = spec.split_once(char::is_whitespace).unwrap_or((spec, ""));
    Ok((name.parse()?, params.trim().to_owned()))
}

fn run(cli: &Cli) -> Result<()> {
    let validate = !cli.no_validate;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Gen(args) => gen(args, cli.seed, out, validate),
        Command::Solve(args) => solve(args, cli.seed, out, validate),
        Command::Probe(args) => probe(args, cli.seed, out, validate),
        Command::Exact { input } => exact(input, out, validate),
        Command::Compare { input, truth, solvers } => {
            let solvers = solvers.iter().map(|s| parse_solver(s)).collect::<Result<Vec<_>>>()?;
            let records = run_compare(input, truth.as_deref(), &solvers, cli.seed, validate)?;
            if records.is_empty() {
                return Ok(());
            }
            let mut buf = Vec::new();
            write_records(&mut buf, &records)?;
            emit(out, &String::from_utf8(buf)?)
        }
        Command::Bench { manifest } => {
            let report = run_suite(manifest, out, cli.seed, validate)?;
            eprintln!(
                "{} rows, {} failed, report at {}",
                report.rows,
                report.failed_rows,
                report.path.display()
            );
            if report.failed_rows > 0 {
                bail!(AssertionFailed(format!(
                    "{} manifest row(s) failed",
                    report.failed_rows
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {:#}", anyhow!(e));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
