//! Pairwise persuasiveness classifiers: given two sentences, predict which
//! one is persuasive from n-gram and phonetic features.

pub mod cv;
pub mod experiment;
pub mod features;
pub mod model;
pub mod selection;
pub mod svm;

pub use cv::{assign_folds, cross_validate, fit, fit_best, CvConfig, CvOutcome, Grid, GridPoint, PipelineMeta};
pub use experiment::{ablation, cross_dataset, evaluate, within_dataset, AblationResult, CrossCell, WithinResult};
pub use features::{extract_ngrams, FeatureSet, FeatureSpace, PreparedCorpus, SparseVec, TextPipeline};
pub use model::{train, Model, TrainParams, TrainingMeta};
pub use selection::{information_gain, rank_ngrams, select_top_k};
pub use svm::SolverOptions;

use thiserror::Error;

use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("corpus `{0}` must be symmetrized before training")]
    NotSymmetrized(String),
    #[error("{groups} pair groups cannot fill {folds} folds")]
    TooFewGroups { groups: usize, folds: usize },
    #[error("need at least two training instances, got {0}")]
    TooFewInstances(usize),
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("kernel degree {0} is not supported (use 1 or 2)")]
    UnsupportedDegree(u8),
    #[error("empty parameter grid for `{0}`")]
    EmptyGrid(String),
    #[error("refusing to train and test on the same dataset `{0}`")]
    SameDataset(String),
    #[error("invalid model file: {0}")]
    ModelFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
