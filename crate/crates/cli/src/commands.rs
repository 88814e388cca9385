//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use euphony::corpus::{load_pairs, PairCorpus, Stopwords, TextMode};
use euphony::learner::experiment::{
    ablation, ablation_text, ablation_tsv, cross_dataset, cross_text, cross_tsv, grid_tsv, within_dataset, within_text,
    within_tsv, AblationResult, CrossCell, WithinResult,
};
use euphony::learner::{fit, CvConfig, FeatureSet, Model, PipelineMeta, PreparedCorpus, TextPipeline};
use euphony::phonodict::PronDict;
use euphony::scorer::score_all;
use euphony::stats::report::{analyze, DatasetScores};
use euphony::stats::{bundled_tongue_twisters, derive_thresholds, Thresholds};

use crate::config::{config_error, DatasetSpec, RunConfig};

pub const ARTIFACT_VERSION: &str = concat!("euphony ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    PartialFailure,
}

/// Lines every output file starts with.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub dictionary: String,
}

impl Provenance {
    pub fn fields(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("artifact".to_string(), ARTIFACT_VERSION.to_string()),
            ("command".to_string(), self.command.clone()),
            ("config_sha256".to_string(), self.config_hash.clone()),
            ("dictionary".to_string(), self.dictionary.clone()),
            ("seed".to_string(), self.seed.to_string()),
        ])
    }

    pub fn header(&self) -> String {
        let mut out = String::new();
        for (k, v) in [
            ("artifact", ARTIFACT_VERSION),
            ("command", &self.command),
            ("config_sha256", &self.config_hash),
            ("seed", &self.seed.to_string()),
            ("dictionary", &self.dictionary),
        ] {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out
    }
}

/// Loaded shared resources.
pub struct RunContext {
    pub config: RunConfig,
    pub dict: PronDict,
    pub stopwords: Stopwords,
    pub provenance: Provenance,
    /// Suppresses echoing reports to stdout; files are still written.
    pub quiet: bool,
}

impl RunContext {
    pub fn load(config: RunConfig, command: &str) -> anyhow::Result<Self> {
        let dict_path = config.dict_path.clone().ok_or_else(|| {
            config_error("no pronunciation dictionary configured (set dict_path, --dict or EUPHONY_DICT)")
        })?;
        let dict =
            PronDict::open(&dict_path).map_err(|e| config_error(format!("dictionary {}: {e}", dict_path.display())))?;
        let stopwords = match &config.stopword_path {
            Some(p) => Stopwords::open(p).map_err(|e| config_error(format!("stopwords {}: {e}", p.display())))?,
            None => Stopwords::default(),
        };
        let provenance = Provenance {
            command: command.to_string(),
            config_hash: config.hash(),
            seed: config.seed,
            dictionary: dict.source_version().to_string(),
        };
        Ok(Self {
            config,
            dict,
            stopwords,
            provenance,
            quiet: false,
        })
    }

    fn echo(&self, text: &str) {
        if !self.quiet {
            print!("{}{text}", self.provenance.header());
        }
    }

    fn out_dir(&self) -> anyhow::Result<PathBuf> {
        let dir = self.config.output_dir();
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }

    fn write(&self, dir: &Path, file: &str, body: &str) -> anyhow::Result<()> {
        let path = dir.join(file);
        fs::write(&path, format!("{}{body}", self.provenance.header()))
            .with_context(|| format!("writing {}", path.display()))
    }

    fn pipeline(&self, spec: &DatasetSpec) -> TextPipeline {
        TextPipeline {
            mode: text_mode(spec.twitter_mode),
            stopwords: self.stopwords.clone(),
        }
    }
}

fn text_mode(twitter: bool) -> TextMode {
    if twitter {
        TextMode::Twitter
    } else {
        TextMode::Generic
    }
}

/// Safe file-name fragment.
fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn score(ctx: &RunContext, texts: &[String], file: Option<&Path>, twitter: bool) -> anyhow::Result<Outcome> {
    let mut sentences: Vec<String> = texts.to_vec();
    if let Some(path) = file {
        let body =
            fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        sentences.extend(body.lines().filter(|l| !l.trim().is_empty()).map(String::from));
    }
    let mode = text_mode(twitter);
    let profiles = score_all(&sentences, mode, &ctx.dict);
    let mut out = ctx.provenance.header();
    out.push_str("sentence\trhyme\talliteration\tplosive\thomogeneity\tt_ph\toov\n");
    for (s, p) in sentences.iter().zip(profiles) {
        let clean = s.replace(['\t', '\r', '\n'], " ");
        let _ = writeln!(
            out,
            "{clean}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}",
            p.rhyme, p.alliteration, p.plosive, p.homogeneity, p.total_phonemes, p.oov_tokens
        );
    }
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(Outcome::Success)
}

pub fn read_thresholds(path: &Path) -> anyhow::Result<Thresholds> {
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("thresholds {}: {e}", path.display())))?;
    let t: Thresholds =
        toml::from_str(&text).map_err(|e| config_error(format!("thresholds {}: {e}", path.display())))?;
    if [t.rhyme, t.alliteration, t.plosive, t.homogeneity]
        .iter()
        .any(|v| !(0.0..=1.0).contains(v))
    {
        return Err(config_error(format!(
            "thresholds {}: values must lie in [0, 1]",
            path.display()
        )));
    }
    Ok(t)
}

pub fn thresholds(ctx: &RunContext, reference: Option<&Path>) -> anyhow::Result<Outcome> {
    let owned;
    let sentences: Vec<&str> = match reference {
        Some(path) => {
            owned =
                fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            owned
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect()
        }
        None => bundled_tongue_twisters(),
    };
    let t = derive_thresholds(&sentences, &ctx.dict).map_err(|e| config_error(format!("reference corpus: {e}")))?;
    let body = toml::to_string(&t)?;
    let dir = ctx.out_dir()?;
    ctx.write(&dir, "thresholds.toml", &body)?;
    ctx.echo(&body);
    Ok(Outcome::Success)
}

/// A dataset that could not be used, reported in place of its results.
struct Failure {
    dataset: String,
    error: String,
}

fn error_blocks(failures: &[Failure]) -> String {
    let mut out = String::new();
    for f in failures {
        let _ = writeln!(out, "\n[error] dataset {}: {}", f.dataset, f.error);
    }
    out
}

fn load_dataset(spec: &DatasetSpec) -> Result<PairCorpus, String> {
    let format = spec.resolved_format().map_err(|e| e.to_string())?;
    let loaded = load_pairs(&spec.path, format).map_err(|e| e.to_string())?;
    if !loaded.rejected.is_empty() {
        log::warn!("dataset `{}`: {} rows rejected", spec.name, loaded.rejected.len());
        for r in &loaded.rejected {
            log::debug!("dataset `{}`: {r}", spec.name);
        }
    }
    if loaded.corpus.is_empty() {
        return Err("no valid pairs".to_string());
    }
    Ok(PairCorpus {
        name: spec.name.clone(),
        ..loaded.corpus
    })
}

fn require_datasets(ctx: &RunContext, min: usize) -> anyhow::Result<()> {
    if ctx.config.datasets.len() < min {
        return Err(config_error(format!(
            "at least {min} dataset(s) must be configured (config `datasets` or --dataset NAME=PATH)"
        )));
    }
    Ok(())
}

pub fn analyze_cmd(ctx: &RunContext) -> anyhow::Result<Outcome> {
    require_datasets(ctx, 1)?;
    ctx.config.validate_datasets(false)?;
    let thresholds = match &ctx.config.thresholds_file {
        Some(p) => read_thresholds(p)?,
        None => Thresholds::TONGUE_TWISTER_REFERENCE,
    };
    let mut scored = Vec::new();
    let mut failures = Vec::new();
    for spec in &ctx.config.datasets {
        match load_dataset(spec) {
            Ok(c) => scored.push(DatasetScores::from_corpus(&c, text_mode(spec.twitter_mode), &ctx.dict)),
            Err(error) => failures.push(Failure {
                dataset: spec.name.clone(),
                error,
            }),
        }
    }
    let dir = ctx.out_dir()?;
    let mut text = String::new();
    if !scored.is_empty() {
        let report = analyze(&scored, &thresholds, ctx.config.spread.into())?;
        ctx.write(&dir, "analysis-means.tsv", &report.means_tsv())?;
        ctx.write(&dir, "analysis-above.tsv", &report.above_tsv())?;
        text.push_str(&report.to_text());
    }
    text.push_str(&error_blocks(&failures));
    ctx.write(&dir, "analysis.txt", &text)?;
    ctx.echo(&text);
    Ok(if failures.is_empty() {
        Outcome::Success
    } else {
        Outcome::PartialFailure
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Within,
    Ablation,
    Cross,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Within => "within",
            Mode::Ablation => "ablation",
            Mode::Cross => "cross",
        }
    }
}

fn cv_for(base: &CvConfig, pipeline: &TextPipeline) -> CvConfig {
    CvConfig {
        pipeline_meta: PipelineMeta::from_pipeline(pipeline),
        ..base.clone()
    }
}

fn save_model(ctx: &RunContext, dir: &Path, mut model: Model) -> anyhow::Result<()> {
    model.provenance = ctx.provenance.fields();
    let name = format!(
        "model-{}-{}.json",
        slug(&model.meta.dataset),
        slug(&model.space.set.label())
    );
    model.save(dir.join(name))?;
    Ok(())
}

pub fn experiment(ctx: &RunContext, mode: Mode, allow_same: bool) -> anyhow::Result<Outcome> {
    let min = if mode == Mode::Cross && !allow_same { 2 } else { 1 };
    require_datasets(ctx, min)?;
    ctx.config.validate_datasets(mode == Mode::Cross && allow_same)?;
    let base = ctx.config.cv_config()?;

    let mut failures = Vec::new();
    let mut prepared: Vec<(PreparedCorpus, CvConfig)> = Vec::new();
    for spec in &ctx.config.datasets {
        let loaded = load_dataset(spec).and_then(|c| c.symmetrize().map_err(|e| e.to_string()));
        match loaded {
            Ok(c) => {
                let pipeline = ctx.pipeline(spec);
                prepared.push((
                    PreparedCorpus::build(&c, &ctx.dict, &pipeline),
                    cv_for(&base, &pipeline),
                ));
            }
            Err(error) => failures.push(Failure {
                dataset: spec.name.clone(),
                error,
            }),
        }
    }

    let dir = ctx.out_dir()?;
    let model_dir = dir.join("models");
    fs::create_dir_all(&model_dir)?;
    let (tsv, text, grid) = match mode {
        Mode::Within => {
            let mut results: Vec<WithinResult> = Vec::new();
            for (corpus, cfg) in &prepared {
                match within_dataset(corpus, cfg) {
                    Ok(r) => {
                        for (outcome, _) in r.rows() {
                            save_model(ctx, &model_dir, fit(corpus, outcome.set, outcome.best, cfg)?)?;
                        }
                        results.push(r);
                    }
                    Err(e) => failures.push(Failure {
                        dataset: corpus.name.clone(),
                        error: e.to_string(),
                    }),
                }
            }
            let grid = grid_tsv(
                results
                    .iter()
                    .flat_map(|r| r.rows().map(|(o, _)| (r.dataset.as_str(), o))),
            );
            (within_tsv(&results), within_text(&results), grid)
        }
        Mode::Ablation => {
            let mut results: Vec<AblationResult> = Vec::new();
            for (corpus, cfg) in &prepared {
                match ablation(corpus, cfg) {
                    Ok(r) => results.push(r),
                    Err(e) => failures.push(Failure {
                        dataset: corpus.name.clone(),
                        error: e.to_string(),
                    }),
                }
            }
            let grid = grid_tsv(results.iter().flat_map(|r| {
                std::iter::once((r.dataset.as_str(), &r.baseline))
                    .chain(r.variants.iter().map(|v| (r.dataset.as_str(), &v.outcome)))
            }));
            (ablation_tsv(&results), ablation_text(&results), grid)
        }
        Mode::Cross => {
            let mut cells: Vec<CrossCell> = Vec::new();
            for (i, (train, cfg)) in prepared.iter().enumerate() {
                let tests: Vec<&PreparedCorpus> = prepared
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| allow_same || *j != i)
                    .map(|(_, (c, _))| c)
                    .collect();
                if tests.is_empty() {
                    continue;
                }
                match cross_dataset(train, &tests, &FeatureSet::MAIN, cfg, allow_same) {
                    Ok((c, models)) => {
                        cells.extend(c);
                        for m in models {
                            save_model(ctx, &model_dir, m)?;
                        }
                    }
                    Err(e) => failures.push(Failure {
                        dataset: train.name.clone(),
                        error: e.to_string(),
                    }),
                }
            }
            (cross_tsv(&cells), cross_text(&cells), String::new())
        }
    };

    let name = mode.name();
    let text = format!("{text}{}", error_blocks(&failures));
    ctx.write(&dir, &format!("{name}.tsv"), &tsv)?;
    ctx.write(&dir, &format!("{name}.txt"), &text)?;
    if !grid.is_empty() {
        ctx.write(&dir, &format!("{name}-grid.tsv"), &grid)?;
    }
    ctx.echo(&text);
    Ok(if failures.is_empty() {
        Outcome::Success
    } else {
        Outcome::PartialFailure
    })
}
