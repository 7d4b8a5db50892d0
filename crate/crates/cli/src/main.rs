//! `snf`: coefficient analysis, dictatorship recovery, boundary checks and
//! experiment sweeps for families of permutations.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use snf_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "snf",
    version,
    about = "Analyze and recover near-dictatorship families in S_n"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo sample count; defaults depend on the step.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SNF_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Override for the `τ ≥ 1 − t` selection threshold.
    #[arg(long, global = true)]
    pub tau_threshold: Option<f64>,
    /// Override for the large-entry distance threshold.
    #[arg(long, global = true)]
    pub large_threshold: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Local,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient matrix, τ matrix, ε and the identity report.
    Analyze { family: PathBuf },
    /// Reconstruct the approximating dictatorship.
    Recover {
        family: PathBuf,
        /// Largest accepted non-large fraction on the strong line.
        #[arg(long, default_value_t = 0.5)]
        p_max: f64,
    },
    /// Edge boundary, the isoperimetric bound and the stability chain.
    Iso { family: PathBuf },
    /// Compare lexicographic segments against the best families found.
    Conjecture {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Comma-separated sizes; all sizes when omitted.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u64>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        /// Directory for witness families that beat the lex segment.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Noise-and-recover sweep over a grid of flip rates.
    Sweep { plan: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoStrongLine { .. } | Error::LineConflict { .. } | Error::MediumValueCluster { .. } => 3,
        Error::Capacity { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Analyze { family } => commands::analyze(&cli.common, family),
        Command::Recover { family, p_max } => commands::recover(&cli.common, family, *p_max),
        Command::Iso { family } => commands::iso(&cli.common, family),
        Command::Conjecture {
            n,
            mode,
            sizes,
            restarts,
            max_iters,
            witness_dir,
        } => commands::conjecture(
            &cli.common,
            commands::ConjectureArgs {
                n: *n,
                mode: *mode,
                sizes: sizes.clone(),
                restarts: *restarts,
                max_iters: *max_iters,
            },
            witness_dir.as_deref(),
        ),
        Command::Sweep { plan } => commands::sweep(&cli.common, plan),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
