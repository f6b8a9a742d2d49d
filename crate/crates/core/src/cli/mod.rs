//! Command-line driver.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circle::CircleError;
use crate::cover::CoverError;
use crate::entropy::EntropyError;
use crate::lamination::LaminationError;
use crate::narrow::NarrowError;

pub use config::ConfigFile;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_ASSERTION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    pub fn assertion(message: impl Into<String>) -> Self {
        CliError { code: EXIT_ASSERTION, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INTERNAL, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<CircleError> for CliError {
    fn from(e: CircleError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<LaminationError> for CliError {
    fn from(e: LaminationError) -> Self {
        use LaminationError::*;
        let code = match e {
            Circle(_) | ZeroAngle | Parse { .. } | TooShallow(_) | DegenerateLeaf(_) => EXIT_USAGE,
            Inconclusive(_) => EXIT_ASSERTION,
            ForwardInvariance { .. } | Crossing(..) | Duplicate { .. } | Ambiguous { .. } | Critical { .. } => {
                EXIT_INTERNAL
            }
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<NarrowError> for CliError {
    fn from(e: NarrowError) -> Self {
        let code = match e {
            NarrowError::Recurrence { .. } => EXIT_ASSERTION,
            NarrowError::Circle(_) | NarrowError::InsufficientDepth { .. } => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        use CoverError::*;
        let code = match e {
            Recurrence { .. } => EXIT_ASSERTION,
            TooManyDeletions { .. } | NoHost(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        let code = match e {
            EntropyError::NonConvergence(..) | EntropyError::RowSumBound { .. } => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "biaccess", version, about = "Laminations, narrow preimages and dimension bounds for external angles")]
pub struct Cli {
    /// Plain-text file of key=value defaults; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a lamination and write it as text, optionally with an SVG.
    Build(BuildArgs),
    /// Count narrow preimages of an un-nested triple.
    Narrow(NarrowArgs),
    /// Build interval families and their cover counts.
    Cover(CoverArgs),
    /// Spectral radius, core entropy and predicted dimension.
    Entropy(EntropyArgs),
    /// Run the whole pipeline on one case and report pass/fail.
    Verify(VerifyArgs),
    /// Render a lamination file as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Chebyshev,
    Basilica,
    Airplane,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Chebyshev => "chebyshev",
            Preset::Basilica => "basilica",
            Preset::Airplane => "airplane",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Preset as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeletionMode {
    Narrow,
    Lex,
    None,
}

impl std::str::FromStr for DeletionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <DeletionMode as ValueEnum>::from_str(s, true)
    }
}

/// Which lamination to build.
#[derive(Debug, Clone, Args, Default)]
pub struct CaseArgs {
    /// Angle of the major leaf's image, as p/q.
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Refuse depths above this.
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    /// Lamination text output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Draw chords as hyperbolic geodesics.
    #[arg(long)]
    pub geodesic: bool,
}

#[derive(Debug, Args)]
pub struct NarrowArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long)]
    pub base_exponent: Option<u32>,
    /// Fraction of scales discarded before the regression.
    #[arg(long)]
    pub burn_in: Option<f64>,
    #[arg(long, value_enum)]
    pub deletion_mode: Option<DeletionMode>,
    /// Generation-0 cell indices on the level-N grid, comma separated.
    #[arg(long)]
    pub cells: Option<String>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Matrix file: rows of space-separated integers.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub degree: Option<u32>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Seed for the sampled metric checks.
    #[arg(long)]
    pub rng_seed: Option<u64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Lamination text file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub geodesic: bool,
}

/// Run a parsed command line, returning the exit code.
pub fn run(cli: Cli) -> u8 {
    let result = ConfigFile::load(cli.config.as_deref()).and_then(|cfg| commands::dispatch(cli.command, cfg));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
