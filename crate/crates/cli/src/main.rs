//! `strfp`: build workloads, train partitions, export models, and evaluate
//! string fingerprints from the command line.

mod commands;
mod config;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Opts, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "strfp",
    version,
    about = "Instance-optimized string fingerprints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Generate a frequency-stratified k-gram workload with a seen/unseen split
    Workload,
    /// Optimize a partition on a training sample and the seen queries
    Train,
    /// Write the round-robin baseline partition
    Baseline,
    /// Write the training instance as an LP-format integer program
    ExportLp,
    /// Turn a solver solution for the exported model into a partition file
    ImportSolution,
    /// Report false positive rates per query and per role
    Eval,
    /// Time full scans against fingerprint-filtered scans
    Bench,
}

/// Bad flags or configuration (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use strfp::Error as E;
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::WidthOutOfRange(_)
            | E::InvalidAlphabet(_)
            | E::InvalidArgument(_)
            | E::SplitOutOfRange { .. },
        ) => 2,
        Some(E::AlphabetTooLarge { .. } | E::InfeasibleSolution(_)) => 4,
        _ => 3,
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("STRFP_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| UsageError(format!("STRFP_THREADS={v:?} is not a number")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    let cfg = RunConfig::resolve(cli.opts)?;
    match cli.command {
        Command::Workload => commands::workload(&cfg),
        Command::Train => commands::train(&cfg),
        Command::Baseline => commands::baseline(&cfg),
        Command::ExportLp => commands::export_lp(&cfg),
        Command::ImportSolution => commands::import_solution(&cfg),
        Command::Eval => commands::eval(&cfg),
        Command::Bench => commands::bench(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
