//! `lorentzian`: certification, decomposition and sampling from the command line.
//!
//! Exit codes: 0 certified or pass, 1 refuted or fail, 2 sufficient
//! conditions fail (inconclusive), 3 usage or input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "lorentzian",
    version,
    about = "Exact log-concavity certificates for set functions"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Override the ground-set cap of the exhaustive certification sweeps.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rank,
    Indicator,
}

/// Where the set function comes from. Exactly one source is required.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Set-function JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Matroid JSON.
    #[arg(long)]
    pub matroid: Option<PathBuf>,
    /// Table built from a matroid.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Coverage-instance JSON.
    #[arg(long)]
    pub coverage: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify complete log-concavity of the degree-d part of f.
    CertifyClc {
        #[command(flatten)]
        source: Source,
        /// Multiaffine homogeneous polynomial JSON (alternative source).
        #[arg(long)]
        poly: Option<PathBuf>,
        /// Degree; defaults to the degree of f.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Certify complete log-concavity of the homogenized generating polynomial.
    CertifyHom {
        #[command(flatten)]
        source: Source,
    },
    /// Verify or construct a 2-coverage certificate of degree d.
    #[command(name = "certify-2cov")]
    Certify2Cov {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        d: usize,
        /// Certificate JSON to verify instead of constructing one.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Verify or construct a strongly 2-coverage certificate.
    CertifyStrong {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Coverage weights by Möbius inversion.
    Mobius {
        #[command(flatten)]
        source: Source,
    },
    /// Ultra-log-concavity of the level sequence.
    Ulc {
        #[command(flatten)]
        source: Source,
    },
    /// Mutual-information decomposition of a joint entropy function.
    Entropy {
        /// Joint pmf JSON.
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the down-up walk.
    Sample {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        /// Start set as a comma list, e.g. 1,3; defaults to the first support set.
        #[arg(long)]
        start: Option<String>,
        /// Independent chains, each on its own generator stream.
        #[arg(long, default_value_t = 1)]
        chains: usize,
    },
    /// Exact mixing time of the down-up walk.
    Mix {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        epsilon: f64,
    },
    /// Reproduce the two built-in negative examples.
    Counterexamples,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let format = cli.format;
    match commands::run(cli) {
        Ok(outcome) => {
            match format {
                Format::Json => {
                    let text = serde_json::to_string_pretty(&outcome.json).expect("serializable report");
                    println!("{text}");
                }
                Format::Text => print!("{}", outcome.text),
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
