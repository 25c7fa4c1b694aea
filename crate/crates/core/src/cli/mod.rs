//! The `mrclab` command line.
//!
//! Exit status is 0 when every check passes, 1 when a mathematical check
//! fails, and 2 for usage, input and model errors. `MRCLAB_THREADS` caps the
//! worker pool. All randomness flows from `--seed` through per-sample
//! splitmix streams, so equal inputs give byte-identical output.

pub mod commands;
pub mod config;
pub mod golden;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{CurveRef, CurveSpec, Expected, ExperimentConfig, Format, ReembedSpec, Term};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<crate::mrc::MrcError> for CliError {
    fn from(e: crate::mrc::MrcError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<crate::koszul::KoszulError> for CliError {
    fn from(e: crate::koszul::KoszulError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<crate::class_calculus::ClassError> for CliError {
    fn from(e: crate::class_calculus::ClassError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// A finished command: its verdict and the three renderings of its output.
#[derive(Clone, Debug)]
pub struct Report {
    pub pass: bool,
    pub text: String,
    pub json: serde_json::Value,
    pub csv: String,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mrclab", version, about = "Betti numbers of points on curves over prime fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "curve")]
    pub config: Option<PathBuf>,
    /// Built-in curve (quintic-x or quintic-y) or a curve JSON file.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub prime: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// A single γ, or an inclusive range `a..b`.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Last row of the diagram to compute.
    #[arg(long)]
    pub rows: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Betti tables of the two rational quintics and of 28 general points on each.
    DemoQuintics {
        /// Repeatable; defaults to 31 and 101.
        #[arg(long = "prime", value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Betti diagram of a curve, or the generic diagram of γ points on it.
    Betti {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Predicted last two rows for γ general points.
    Predict {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generic diagrams and MRC verdicts over a γ range.
    MrcCheck {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum)]
        expected: Option<ExpectedArg>,
        /// Compute only the two cells of this diagonal.
        #[arg(long)]
        diagonal: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Divisor class coefficients over ranges of g and i.
    Classes {
        /// Genus, or an inclusive range `a..b`; every g must be at least 4.
        #[arg(long, default_value = "4..40")]
        g: String,
        /// Index, or an inclusive range; defaults to `1..(g-1)/2`.
        #[arg(long)]
        i: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Chern class identities and enumerative spot checks.
    VerifyIdentities {
        /// Genus range for the difference-variety checks.
        #[arg(long, default_value = "4..40")]
        g: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExpectedArg {
    Holds,
    Fails,
    ReportOnly,
}

impl From<ExpectedArg> for Expected {
    fn from(e: ExpectedArg) -> Self {
        match e {
            ExpectedArg::Holds => Expected::Holds,
            ExpectedArg::Fails => Expected::Fails,
            ExpectedArg::ReportOnly => Expected::ReportOnly,
        }
    }
}

/// Parses `7` or the inclusive range `4..40` (also `4..=40`).
pub fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Input(format!("invalid range {:?}", s));
    let (a, b) = match s.split_once("..") {
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
    };
    if a > b {
        return Err(CliError::Input(format!("empty range {:?}", s)));
    }
    Ok((a, b))
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MRCLAB_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Input(format!("MRCLAB_THREADS={:?} is not a count", v)))?;
        // A second call in the same process finds the pool already built.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn emit(report: &Report, format: Format, output: Option<&PathBuf>) -> Result<(), CliError> {
    let body = report.render(format);
    match output {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let (report, out, cfg_out) = match cli.command {
        Command::DemoQuintics { primes, samples, seed, out } => {
            let primes = if primes.is_empty() { vec![31, 101] } else { primes };
            (commands::demo_quintics(&primes, samples, seed)?, out, None)
        }
        Command::Betti { exp, out } => {
            let cfg = experiment(&exp, None, None)?;
            (commands::betti(&cfg)?, out, Some(cfg))
        }
        Command::Predict { exp, out } => {
            let cfg = experiment(&exp, None, None)?;
            (commands::predict(&cfg)?, out, Some(cfg))
        }
        Command::MrcCheck { exp, expected, diagonal, out } => {
            let cfg = experiment(&exp, expected.map(Expected::from), diagonal)?;
            (commands::mrc_check(&cfg)?, out, Some(cfg))
        }
        Command::Classes { g, i, out } => {
            let g = parse_range(&g)?;
            let i = i.as_deref().map(parse_range).transpose()?;
            (commands::classes(g, i)?, out, None)
        }
        Command::VerifyIdentities { g, out } => (commands::verify_identities(parse_range(&g)?)?, out, None),
    };
    let format = out.format.or(cfg_out.as_ref().and_then(|c| c.format)).unwrap_or_default();
    let output = out.output.as_ref().or(cfg_out.as_ref().and_then(|c| c.output.as_ref()));
    emit(&report, format, output)?;
    Ok(report.pass)
}

/// Merges a config file (if any) with command-line overrides.
fn experiment(exp: &ExperimentArgs, expected: Option<Expected>, diagonal: Option<usize>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&exp.config, &exp.curve) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) if name.ends_with(".json") => ExperimentConfig::curve_file(Path::new(name))?,
        (None, Some(name)) => ExperimentConfig::builtin(name),
        (None, None) => return Err(CliError::Input("give --config or --curve".into())),
    };
    if let Some(p) = exp.prime {
        cfg.prime = Some(p);
    }
    if let Some(s) = exp.samples {
        cfg.samples = s;
    }
    if let Some(s) = exp.seed {
        cfg.seed = s;
    }
    if let Some(g) = &exp.gamma {
        let (a, b) = parse_range(g)?;
        if a < 0 {
            return Err(CliError::Input(format!("negative γ in {:?}", g)));
        }
        cfg.gamma = None;
        cfg.gamma_range = Some((a as usize, b as usize + 1));
    }
    if let Some(r) = exp.rows {
        cfg.rows = Some(r);
    }
    if let Some(e) = expected {
        cfg.expected = e;
    }
    if diagonal.is_some() {
        cfg.diagonal = diagonal;
    }
    cfg.validate()?;
    Ok(cfg)
}
