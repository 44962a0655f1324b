//! Command-line front end: generate → extract → train → evaluate → report.

mod commands;
mod config;

pub use commands::{
    cmd_evaluate, cmd_extract, cmd_generate, cmd_report, cmd_score_session, cmd_train, cv_report_file,
    extract_features, load_dataset, trial_stem, EvaluationReport, ReportKind,
};
pub use config::{EvalMode, EvaluateConfig, GeneratorConfig, PathsConfig, RunConfig};

use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::ingest::IngestError;
use crate::learner::LearnerError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::MissingInput(_) => 3,
            CliError::Protocol(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    fn from_io(path: &Path, e: std::io::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e.kind() {
            ErrorKind::NotFound => CliError::MissingInput(msg),
            ErrorKind::InvalidData => CliError::Other(msg),
            _ => CliError::Io(msg),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { path, source } => CliError::from_io(&path, source),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<LearnerError> for CliError {
    fn from(e: LearnerError) -> Self {
        match e {
            LearnerError::Protocol(msg) => CliError::Protocol(msg),
            other => CliError::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "earspo2", version, about = "In-ear PPG workload pipeline")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Sets the generator, forest and shuffle seeds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic cohort of recordings and manifests.
    Generate {
        #[arg(long)]
        subjects: Option<usize>,
    },
    /// Recordings and manifests to the epoch feature table.
    Extract,
    /// Fit the boosted forest on the feature table.
    Train {
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u8>>,
    },
    /// Cross-validate and write the report JSON.
    Evaluate {
        #[arg(long, value_enum)]
        mode: Option<EvalMode>,
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u8>>,
    },
    /// Confusion, importance, KDE, ANOVA or summary report from the feature table.
    Report {
        #[arg(long, value_enum)]
        kind: ReportKind,
        /// Which cross-validation report a confusion report reads.
        #[arg(long, value_enum)]
        mode: Option<EvalMode>,
    },
    /// Error rate of one session manifest.
    ScoreSession { manifest: PathBuf },
}

/// Effective configuration: file (or defaults), then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.set_seed(seed);
    }
    if let Some(out) = &cli.out {
        config.paths.output = out.clone();
    }
    match &cli.command {
        Command::Generate { subjects: Some(n) } => config.generator.n_subjects = *n,
        Command::Train { levels: Some(l) } | Command::Evaluate { levels: Some(l), .. } => {
            config.evaluate.levels = l.clone()
        }
        _ => {}
    }
    if let Command::Evaluate { mode: Some(m), .. } = &cli.command {
        config.evaluate.mode = *m;
    }
    Ok(config)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = resolve_config(cli)?;
    match &cli.command {
        Command::Generate { .. } => {
            for path in cmd_generate(&config)? {
                println!("{}", path.display());
            }
        }
        Command::Extract => {
            let (path, rows) = cmd_extract(&config)?;
            println!("{rows} epochs -> {}", path.display());
        }
        Command::Train { .. } => println!("{}", cmd_train(&config)?.display()),
        Command::Evaluate { .. } => {
            let (path, report) = cmd_evaluate(&config, config.evaluate.mode)?;
            println!("overall accuracy {:.4} -> {}", report.report.overall_accuracy, path.display());
        }
        Command::Report { kind, mode } => {
            for path in cmd_report(&config, *kind, mode.unwrap_or(config.evaluate.mode))? {
                println!("{}", path.display());
            }
        }
        Command::ScoreSession { manifest } => {
            let (m, rate) = cmd_score_session(manifest)?;
            println!("{} {}-back error rate {rate:.4}%", m.subject_id, m.nback_level);
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
