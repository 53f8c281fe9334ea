use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
mod config;

use config::{OutputFormat, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags, configuration or input files.
    #[error("{0}")]
    Usage(String),
    /// An evaluation or check could not be completed, e.g. at a pole.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }
}

/// Jacobi elliptic Cliffordian functions: evaluation and verification.
#[derive(Debug, Parser)]
#[command(name = "cliff-elliptic", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Bundled lattice (m0-square, m1-unit) or path to a lattice JSON file.
    #[arg(long, global = true)]
    lattice: Option<String>,
    /// JSON run configuration; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the sample points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncation radius (shells of the lattice sum).
    #[arg(long, global = true)]
    max_radius: Option<u32>,
    /// Stop summing once the tail estimate falls below this (eval only).
    #[arg(long, global = true)]
    target_tol: Option<f64>,
    /// Report directory; defaults to $CLIFF_ELLIPTIC_OUT, then ".".
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate zeta, C or S<i> at a paravector.
    Eval {
        /// zeta, C or S<i>.
        #[arg(long = "fn")]
        function: String,
        /// 2m+2 coordinates, or a single scalar.
        #[arg(long, num_args = 1.., allow_negative_numbers = true, value_delimiter = ',')]
        at: Vec<f64>,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[arg(value_parser = ["periodicity", "oddness", "quasi", "zeros", "residues", "hidden", "laurent", "relations"])]
        suite: String,
        /// Sample points for the pointwise suites.
        #[arg(long)]
        samples: Option<usize>,
        /// Sample points for the suites that compare two radii.
        #[arg(long)]
        trend_samples: Option<usize>,
        /// Threshold override, key=value (repeatable).
        #[arg(long = "threshold")]
        thresholds: Vec<String>,
    },
    /// Translation-operator utilities.
    Operators {
        #[command(subcommand)]
        action: OperatorsCommand,
    },
    /// Check the subset-sum lemma and the alternating identity for n.
    Lemma {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
enum OperatorsCommand {
    /// Expand a product such as "(1-E1)(1+E2)" into a translation word.
    Expand { expr: String },
}

/// Text for stdout and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let g = cli.global;
    if g.lattice.is_some() {
        cfg.lattice = g.lattice;
    }
    cfg.seed = g.seed.or(cfg.seed);
    cfg.max_radius = g.max_radius.or(cfg.max_radius);
    cfg.target_tol = g.target_tol.or(cfg.target_tol);
    cfg.output_dir = g.output_dir.or(cfg.output_dir);
    cfg.output = g.output.or(cfg.output);

    match cli.command {
        Command::Eval { function, at } => commands::eval(&cfg, &function, &at),
        Command::Verify {
            suite,
            samples,
            trend_samples,
            thresholds,
        } => {
            cfg.samples = samples.or(cfg.samples);
            cfg.trend_samples = trend_samples.or(cfg.trend_samples);
            cfg.override_thresholds(&thresholds)?;
            commands::verify(&cfg, &suite)
        }
        Command::Operators {
            action: OperatorsCommand::Expand { expr },
        } => commands::expand(&expr),
        Command::Lemma { n } => commands::lemma(n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
