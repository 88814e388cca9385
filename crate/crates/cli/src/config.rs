//! Run configuration: a TOML file merged with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use euphony::corpus::PairFormat;
use euphony::learner::{CvConfig, Grid, SolverOptions};
use euphony::stats::Spread;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A problem with the configuration or its inputs; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    /// Inferred from the file extension when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<PairFormat>,
    #[serde(default)]
    pub twitter_mode: bool,
}

impl DatasetSpec {
    pub fn resolved_format(&self) -> Result<PairFormat, anyhow::Error> {
        self.format
            .or_else(|| PairFormat::from_path(&self.path))
            .ok_or_else(|| {
                config_error(format!(
                    "dataset `{}`: cannot infer format of {}; set `format`",
                    self.name,
                    self.path.display()
                ))
            })
    }

    /// `NAME=PATH` from the command line.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        let (name, path) = s
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=PATH, got `{s}`"))?;
        if name.is_empty() || path.is_empty() {
            return Err(format!("expected NAME=PATH, got `{s}`"));
        }
        Ok(Self {
            name: name.to_string(),
            path: PathBuf::from(path),
            format: None,
            twitter_mode: false,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ngram_k: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ngram_degrees: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phonetic_degrees: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_epochs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpreadChoice {
    #[default]
    Population,
    Sample,
}

impl From<SpreadChoice> for Spread {
    fn from(s: SpreadChoice) -> Self {
        match s {
            SpreadChoice::Population => Spread::Population,
            SpreadChoice::Sample => Spread::Sample,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dict_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopword_path: Option<PathBuf>,
    /// Threshold file written by `euphony thresholds`; the published
    /// tongue-twister constants are used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds_file: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub spread: SpreadChoice,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
}

fn rebase(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl RunConfig {
    /// Reads a TOML file; relative paths inside it are taken relative to the
    /// file's directory.
    pub fn from_file(path: &Path) -> Result<Self, anyhow::Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| config_error(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        rebase(base, &mut cfg.dict_path);
        rebase(base, &mut cfg.stopword_path);
        rebase(base, &mut cfg.thresholds_file);
        rebase(base, &mut cfg.output_dir);
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        Ok(cfg)
    }

    /// SHA-256 of the canonical TOML rendering of the effective configuration.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("euphony-out"))
    }

    /// Every dataset must name a readable file and have a unique name.
    pub fn validate_datasets(&self, allow_duplicate_names: bool) -> Result<(), anyhow::Error> {
        for (i, d) in self.datasets.iter().enumerate() {
            if fs::File::open(&d.path).is_err() {
                return Err(config_error(format!(
                    "dataset `{}`: cannot read {}",
                    d.name,
                    d.path.display()
                )));
            }
            d.resolved_format()?;
            if !allow_duplicate_names && self.datasets[..i].iter().any(|o| o.name == d.name) {
                return Err(config_error(format!(
                    "dataset name `{}` is used twice (training and testing on the same dataset needs --allow-same)",
                    d.name
                )));
            }
        }
        Ok(())
    }

    pub fn cv_config(&self) -> Result<CvConfig, anyhow::Error> {
        let g = &self.grid;
        let defaults = CvConfig::default();
        let ngram_grid = Grid {
            degrees: g.ngram_degrees.clone().unwrap_or(defaults.ngram_grid.degrees),
            feature_counts: g.ngram_k.clone().unwrap_or(defaults.ngram_grid.feature_counts),
            c_values: g.c.clone().unwrap_or(defaults.ngram_grid.c_values),
        };
        let phonetic_grid = Grid {
            degrees: g.phonetic_degrees.clone().unwrap_or(defaults.phonetic_grid.degrees),
            feature_counts: Vec::new(),
            c_values: g.c.clone().unwrap_or(defaults.phonetic_grid.c_values),
        };
        for grid in [&ngram_grid, &phonetic_grid] {
            if let Some(d) = grid.degrees.iter().find(|d| !(1..=2).contains(*d)) {
                return Err(config_error(format!("kernel degree {d} is not supported (use 1 or 2)")));
            }
            if grid.c_values.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
                return Err(config_error("regularization values must be positive"));
            }
            if grid.degrees.is_empty() || grid.c_values.is_empty() {
                return Err(config_error("grid lists must not be empty"));
            }
        }
        if ngram_grid.feature_counts.is_empty() || ngram_grid.feature_counts.contains(&0) {
            return Err(config_error("ngram_k must list positive feature counts"));
        }
        let folds = g.folds.unwrap_or(defaults.folds);
        if folds < 2 {
            return Err(config_error("folds must be at least 2"));
        }
        Ok(CvConfig {
            folds,
            seed: self.seed,
            ngram_grid,
            phonetic_grid,
            solver: SolverOptions {
                tolerance: g.tolerance.unwrap_or(defaults.solver.tolerance),
                max_epochs: g.max_epochs.unwrap_or(defaults.solver.max_epochs),
                seed: self.seed,
            },
            pipeline_meta: defaults.pipeline_meta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config_and_rebases_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            r#"
dict_path = "dict/cmu.dict"
seed = 7
spread = "sample"

[grid]
folds = 5
ngram_k = [100, 200]

[[datasets]]
name = "slogan"
path = "data/slogan.tsv"
twitter_mode = true
"#,
        )
        .unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.dict_path.unwrap(), dir.path().join("dict/cmu.dict"));
        assert_eq!(cfg.datasets[0].path, dir.path().join("data/slogan.tsv"));
        assert_eq!(cfg.datasets[0].resolved_format().unwrap(), PairFormat::Tsv);
        assert_eq!(cfg.spread, SpreadChoice::Sample);
        let cv = RunConfig::from_file(&path).unwrap().cv_config().unwrap();
        assert_eq!(cv.folds, 5);
        assert_eq!(cv.seed, 7);
        assert_eq!(cv.ngram_grid.feature_counts, [100, 200]);
        assert_eq!(cv.phonetic_grid.degrees, [1, 2]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "sed = 1\n").unwrap();
        let err = RunConfig::from_file(&path).unwrap_err();
        assert!(err.downcast_ref::<ConfigError>().is_some());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        assert_eq!(a.hash(), RunConfig::default().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn dataset_flag_syntax() {
        let d = DatasetSpec::parse_flag("movie=data/m.jsonl").unwrap();
        assert_eq!(d.name, "movie");
        assert_eq!(d.resolved_format().unwrap(), PairFormat::Jsonl);
        assert!(DatasetSpec::parse_flag("nopath").is_err());
    }
}
