//! `euphony` command-line front end: score sentences, analyze paired corpora,
//! derive thresholds and run classification experiments.
//!
//! Exit codes: 0 success, 1 partial failure, 2 configuration error.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Mode, Outcome, RunContext};
use config::{ConfigError, DatasetSpec, RunConfig, SpreadChoice};

#[derive(Debug, Parser)]
#[command(
    name = "euphony",
    version,
    about = "Phonetic euphony scoring and persuasiveness experiments"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// CMU-format pronunciation dictionary.
    #[arg(long, env = "EUPHONY_DICT", global = true)]
    dict: Option<PathBuf>,
    /// Stopword list, one word per line.
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report files and models.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dataset as NAME=PATH; repeatable. Replaces configured datasets.
    #[arg(long = "dataset", global = true, value_parser = DatasetSpec::parse_flag)]
    datasets: Vec<DatasetSpec>,
    /// Write report files without echoing them to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print phonetic scores for sentences as TSV.
    Score {
        /// Sentence to score; repeatable.
        #[arg(long)]
        text: Vec<String>,
        /// File with one sentence per line.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Tag URLs and mentions before scoring.
        #[arg(long)]
        twitter: bool,
    },
    /// Compare persuasive and non-persuasive score distributions.
    Analyze {
        /// Threshold file from `euphony thresholds`.
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long, value_enum)]
        spread: Option<SpreadArg>,
    },
    /// Derive per-device thresholds as mean scores over a reference corpus.
    Thresholds {
        /// Reference sentences, one per line; defaults to the bundled tongue twisters.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Cross-validated classification experiments.
    Experiment {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Allow training and testing on the same dataset (sanity check).
        #[arg(long)]
        allow_same: bool,
        #[arg(long)]
        folds: Option<usize>,
        /// Comma-separated selected n-gram counts.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        /// Comma-separated kernel degrees for n-gram feature sets.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<u8>>,
        /// Comma-separated kernel degrees for the phonetic feature set.
        #[arg(long, value_delimiter = ',')]
        phonetic_degrees: Option<Vec<u8>>,
        /// Comma-separated regularization constants.
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SpreadArg {
    Population,
    Sample,
}

fn effective_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &cli.dict {
        cfg.dict_path = Some(d.clone());
    }
    if let Some(s) = &cli.stopwords {
        cfg.stopword_path = Some(s.clone());
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    if !cli.datasets.is_empty() {
        cfg.datasets = cli.datasets.clone();
    }
    match &cli.command {
        Command::Analyze { thresholds, spread } => {
            if let Some(t) = thresholds {
                cfg.thresholds_file = Some(t.clone());
            }
            if let Some(s) = spread {
                cfg.spread = match s {
                    SpreadArg::Population => SpreadChoice::Population,
                    SpreadArg::Sample => SpreadChoice::Sample,
                };
            }
        }
        Command::Experiment {
            folds,
            k,
            degrees,
            phonetic_degrees,
            c,
            ..
        } => {
            let g = &mut cfg.grid;
            g.folds = folds.or(g.folds);
            g.ngram_k = k.clone().or(g.ngram_k.take());
            g.ngram_degrees = degrees.clone().or(g.ngram_degrees.take());
            g.phonetic_degrees = phonetic_degrees.clone().or(g.phonetic_degrees.take());
            g.c = c.clone().or(g.c.take());
        }
        _ => {}
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = effective_config(cli)?;
    let command = match &cli.command {
        Command::Score { .. } => "score".to_string(),
        Command::Analyze { .. } => "analyze".to_string(),
        Command::Thresholds { .. } => "thresholds".to_string(),
        Command::Experiment { mode, .. } => format!("experiment --mode {}", format!("{mode:?}").to_lowercase()),
    };
    let mut ctx = RunContext::load(cfg, &command)?;
    ctx.quiet = cli.quiet;
    match &cli.command {
        Command::Score { text, file, twitter } => {
            if text.is_empty() && file.is_none() {
                return Err(config::config_error("score needs --text or --file"));
            }
            commands::score(&ctx, text, file.as_deref(), *twitter)
        }
        Command::Analyze { .. } => commands::analyze_cmd(&ctx),
        Command::Thresholds { reference } => commands::thresholds(&ctx, reference.as_deref()),
        Command::Experiment { mode, allow_same, .. } => commands::experiment(&ctx, *mode, *allow_same),
    }
}

/// Parses `args` (program name first), runs the command and maps the outcome
/// to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::PartialFailure) => {
            eprintln!("euphony: some datasets failed; see the error blocks in the report");
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("euphony: configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("euphony: error: {e:#}");
            ExitCode::from(1)
        }
    }
}
