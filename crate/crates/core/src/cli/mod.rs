//! The `dipole-loop` batch front end: config parsing, commands and CSV output.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::error::Error;

pub use config::{parse_config, parse_config_with_overrides, ConfigError, ConfigErrors, RunConfig};
pub use output::{format_float, Cell, Table};

/// Environment variable with the worker thread count; 0 or unset means automatic.
pub const THREADS_ENV: &str = "DIPOLE_LOOP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    JcEvolve,
    JcRabi,
    NrReduce,
    LoopSelfenergy,
    LoopVertex,
    LoopPolarization,
    ReportCounterterms,
    CheckDims,
    OracleVerify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::JcEvolve => "jc-evolve",
            Self::JcRabi => "jc-rabi",
            Self::NrReduce => "nr-reduce",
            Self::LoopSelfenergy => "loop-selfenergy",
            Self::LoopVertex => "loop-vertex",
            Self::LoopPolarization => "loop-polarization",
            Self::ReportCounterterms => "report-counterterms",
            Self::CheckDims => "check-dims",
            Self::OracleVerify => "oracle-verify",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "dipole-loop",
    version,
    about = "Two-level dipole field theory: cavity dynamics, NR reduction and one-loop cutoff scans"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Run configuration (`section.key = value` lines).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cutoff grid for the divergence fits, `start:stop:count[,log|lin]`; overrides `loop.fit_lambda`.
    #[arg(long = "lambda-grid")]
    pub lambda_grid: Option<String>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(Error),
    Oracle(Vec<String>),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Config(_) => 2,
            Self::Numeric(_) => 3,
            Self::Oracle(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error:\n{m}"),
            Self::Numeric(e) => write!(f, "numerical error: {e}"),
            Self::Oracle(fails) => {
                write!(f, "oracle verification failed:")?;
                for m in fails {
                    write!(f, "\n  {m}")?;
                }
                Ok(())
            }
            Self::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            // input validation inside the numerical layers still counts as a config problem
            Error::InvalidInput(m) => Self::Config(m),
            Error::UnsupportedDimension(_) => Self::Config(e.to_string()),
            other => Self::Numeric(other),
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Reads `DIPOLE_LOOP_THREADS`; `None` means let rayon decide.
pub fn thread_count(value: Option<&str>) -> Result<Option<usize>, Failure> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(Failure::Config(format!(
                "{THREADS_ENV}: expected a non-negative integer, got '{v}'"
            ))),
        },
    }
}

pub fn load_config(path: &Path, lambda_grid: Option<&str>) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let overrides: Vec<(&str, &str, &str)> = lambda_grid
        .map(|g| vec![("loop.fit_lambda", g, "--lambda-grid")])
        .unwrap_or_default();
    parse_config_with_overrides(&text, &overrides).map_err(|e| Failure::Config(e.to_string()))
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<commands::CommandOutput, Failure> {
    let out = match command {
        Command::JcEvolve => commands::jc_evolve(cfg),
        Command::JcRabi => commands::jc_rabi(cfg),
        Command::NrReduce => commands::nr_reduce(cfg),
        Command::LoopSelfenergy => commands::loop_selfenergy(cfg),
        Command::LoopVertex => commands::loop_vertex(cfg),
        Command::LoopPolarization => commands::loop_polarization(cfg),
        Command::ReportCounterterms => commands::report_counterterms(cfg),
        Command::CheckDims => commands::check_dims(cfg),
        Command::OracleVerify => commands::oracle_verify(cfg),
    }?;
    Ok(out)
}

/// Runs one command end to end: config, computation, files.
pub fn run(args: &Args) -> Result<Outcome, Failure> {
    let mut cfg = load_config(&args.config, args.lambda_grid.as_deref())?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    cfg.resolved.insert("output.dir".into(), dir.display().to_string());
    let out = execute(args.command, &cfg)?;

    std::fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let name = args.command.name();
    let mut files = Vec::new();
    for t in &out.tables {
        let p = t
            .write(&dir, name, &cfg.resolved)
            .map_err(|e| Failure::Io(format!("{}: {e}", dir.join(&t.name).display())))?;
        files.push(p);
    }
    if let Some((file, text)) = &out.text {
        let p = dir.join(file);
        std::fs::write(&p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
        files.push(p);
    }
    if !out.oracle_failures.is_empty() {
        return Err(Failure::Oracle(out.oracle_failures));
    }
    Ok(Outcome {
        summary: out.summary,
        files,
    })
}
