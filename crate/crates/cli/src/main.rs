//! `fbm-ruin`: command-line front end for the two-company fBm ruin model.

mod commands;
mod config;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::ModelArgs;
use output::Format;
use ruin_core::{PaperFlags, RuinError, DEFAULT_SEED};

/// Invalid command-line or config input (exit code 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug, Parser)]
#[command(name = "fbm-ruin", version, about = "Simultaneous and joint ruin of two insurers under fractional Brownian claims")]
pub struct Cli {
    /// JSON file with keys a1, a2, c1, c2, sigma1, sigma2, h, horizon, n_businesses
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for all simulations
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write primary output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write an SVG chart (convergence only)
    #[arg(long, global = true)]
    pub plot: bool,
    /// Reproduce formulas as printed instead of the corrected defaults
    #[arg(long = "paper-flags", global = true, value_enum, value_delimiter = ',')]
    pub paper_flags: Vec<PaperFlag>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaperFlag {
    StrictSign,
    PsiForm,
    #[value(name = "printed-h1")]
    PrintedH1,
}

impl Cli {
    pub fn flags(&self) -> PaperFlags {
        PaperFlags {
            strict_sign: self.paper_flags.contains(&PaperFlag::StrictSign),
            psi_form: self.paper_flags.contains(&PaperFlag::PsiForm),
            printed_h1_branches: self.paper_flags.contains(&PaperFlag::PrintedH1),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize the model and report critical points, constants and regime
    Classify,
    /// Exact asymptotics of the simultaneous or joint ruin probability
    Asym(commands::AsymArgs),
    /// Logarithmic decay rate of the joint ruin probability
    Logasym(commands::LogasymArgs),
    /// Monte Carlo estimate of a ruin probability
    Simulate(commands::SimulateArgs),
    /// Pickands constant H_{2H}
    Pickands(commands::PickandsArgs),
    /// Piterbarg-type constant for the Brownian crossing case
    Piterbarg(commands::PiterbargArgs),
    /// Monte Carlo against asymptotics over increasing N
    Convergence(commands::ConvergenceArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<RuinError>() {
            return if e.is_validation() { 2 } else { 3 };
        }
        if cause.is::<Usage>() {
            return 2;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
