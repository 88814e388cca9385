//! Grouped k-fold cross-validation with a grid over kernel degree, selected
//! feature count and regularization.
//!
//! Folds are assigned per pair group, so a pair and its swapped twin are
//! always held out together. Feature ranking is refit on each training split.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureSet, PairFeatureVector, PreparedCorpus, TextPipeline};
use super::model::{train, Model, TrainParams, TrainingMeta};
use super::selection::{rank_ngrams, select_top_k, RankIndex};
use super::svm::SolverOptions;
use super::LearnError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub degrees: Vec<u8>,
    /// Selected n-gram counts; ignored for the phonetic-only set.
    pub feature_counts: Vec<usize>,
    pub c_values: Vec<f64>,
}

impl Grid {
    /// Degree 1 with 1k, 2k, ..., 20k selected n-grams.
    pub fn ngram_default() -> Self {
        Self {
            degrees: vec![1],
            feature_counts: (1..=20).map(|i| i * 1000).collect(),
            c_values: vec![1.0],
        }
    }

    /// Degrees 1 and 2 over the eight phonetic columns.
    pub fn phonetic_default() -> Self {
        Self {
            degrees: vec![1, 2],
            feature_counts: Vec::new(),
            c_values: vec![1.0],
        }
    }

    /// Grid points in evaluation order: degree, then k, then C.
    pub fn points(&self, set: FeatureSet) -> Vec<GridPoint> {
        let ks: Vec<Option<usize>> = if set.uses_ngrams() {
            self.feature_counts.iter().map(|&k| Some(k)).collect()
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for &degree in &self.degrees {
            for &k in &ks {
                for &c in &self.c_values {
                    out.push(GridPoint { degree, k, c });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub degree: u8,
    pub k: Option<usize>,
    pub c: f64,
}

impl GridPoint {
    /// `(3k, 1)` style annotation; `-` stands for "no selection".
    pub fn annotation(&self) -> String {
        let k = match self.k {
            None => "-".to_string(),
            Some(k) if k % 1000 == 0 => format!("{}k", k / 1000),
            Some(k) => k.to_string(),
        };
        format!("({k}, {})", self.degree)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub ngram_grid: Grid,
    pub phonetic_grid: Grid,
    pub solver: SolverOptions,
    pub pipeline_meta: PipelineMeta,
}

/// Text settings recorded into trained models.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineMeta {
    pub text_mode: crate::corpus::TextMode,
    pub stopwords: Vec<String>,
}

impl PipelineMeta {
    pub fn from_pipeline(p: &TextPipeline) -> Self {
        Self {
            text_mode: p.mode,
            stopwords: p.stopwords.words().into_iter().map(String::from).collect(),
        }
    }
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 0,
            ngram_grid: Grid::ngram_default(),
            phonetic_grid: Grid::phonetic_default(),
            solver: SolverOptions::default(),
            pipeline_meta: PipelineMeta::from_pipeline(&TextPipeline::default()),
        }
    }
}

impl CvConfig {
    pub fn grid_for(&self, set: FeatureSet) -> &Grid {
        if set.uses_ngrams() {
            &self.ngram_grid
        } else {
            &self.phonetic_grid
        }
    }
}

/// Result of grid-searched cross-validation for one feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub set: FeatureSet,
    /// Pooled out-of-fold accuracy of every grid point, in grid order.
    pub scores: Vec<(GridPoint, f64)>,
    pub best: GridPoint,
    pub accuracy: f64,
    /// Out-of-fold correctness of the best point, per instance.
    pub correct: Vec<bool>,
}

/// Fold index of every pair; twins share their group's fold.
pub fn assign_folds(corpus: &PreparedCorpus, folds: usize, seed: u64) -> Result<Vec<usize>, LearnError> {
    if folds < 2 || corpus.group_count < folds {
        return Err(LearnError::TooFewGroups {
            groups: corpus.group_count,
            folds,
        });
    }
    let mut groups: Vec<usize> = (0..corpus.group_count).collect();
    groups.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of_group = vec![0; corpus.group_count];
    for (pos, g) in groups.into_iter().enumerate() {
        fold_of_group[g] = pos % folds;
    }
    Ok(corpus.pairs.iter().map(|p| fold_of_group[p.group as usize]).collect())
}

struct FoldSplit {
    train: Vec<usize>,
    test: Vec<usize>,
    ranking: Option<(Vec<super::selection::RankedFeature>, RankIndex)>,
}

fn meta_for(corpus: &PreparedCorpus, cfg: &CvConfig, c: f64, seed: u64) -> TrainingMeta {
    TrainingMeta {
        dataset: corpus.name.clone(),
        seed,
        c,
        tolerance: cfg.solver.tolerance,
        text_mode: cfg.pipeline_meta.text_mode,
        stopwords: cfg.pipeline_meta.stopwords.clone(),
        instances: 0,
        cv_accuracy: None,
        folds: None,
    }
}

fn fit_on(
    corpus: &PreparedCorpus,
    set: FeatureSet,
    point: GridPoint,
    train_idx: &[usize],
    ranking: Option<&(Vec<super::selection::RankedFeature>, RankIndex)>,
    cfg: &CvConfig,
    seed: u64,
) -> Result<(Model, super::features::Binding), LearnError> {
    let (space, binding) = match ranking {
        Some((ranked, index)) => {
            let k = point.k.unwrap_or(ranked.len()).min(ranked.len());
            (select_top_k(set, ranked, &corpus.ngram_names, k), index.binding(k))
        }
        None => {
            let space = select_top_k(set, &[], &corpus.ngram_names, 0);
            let binding = space.bind(&corpus.ngram_names);
            (space, binding)
        }
    };
    let vectors: Vec<PairFeatureVector> = train_idx
        .iter()
        .map(|&i| PairFeatureVector {
            values: space.vectorize(&corpus.pairs[i], &binding),
            label: corpus.pairs[i].label,
        })
        .collect();
    let params = TrainParams {
        degree: point.degree,
        c: point.c,
        solver: SolverOptions { seed, ..cfg.solver },
    };
    let model = train(&vectors, space, &params, meta_for(corpus, cfg, point.c, seed))?;
    Ok((model, binding))
}

/// Grid search by `cfg.folds`-fold cross-validation.
pub fn cross_validate(corpus: &PreparedCorpus, set: FeatureSet, cfg: &CvConfig) -> Result<CvOutcome, LearnError> {
    if !corpus.symmetrized {
        return Err(LearnError::NotSymmetrized(corpus.name.clone()));
    }
    let points = cfg.grid_for(set).points(set);
    if points.is_empty() {
        return Err(LearnError::EmptyGrid(set.label()));
    }
    let fold_of = assign_folds(corpus, cfg.folds, cfg.seed)?;

    let splits: Vec<FoldSplit> = crate::par::map_range(cfg.folds, |f| {
        let (train, test): (Vec<usize>, Vec<usize>) = (0..corpus.len()).partition(|&i| fold_of[i] != f);
        let ranking = set.uses_ngrams().then(|| {
            let ranked = rank_ngrams(corpus, &train);
            let index = RankIndex::new(&ranked, corpus.ngram_names.len());
            (ranked, index)
        });
        FoldSplit { train, test, ranking }
    });

    if let Some(max_k) = points.iter().filter_map(|p| p.k).max() {
        let available = splits
            .iter()
            .filter_map(|s| s.ranking.as_ref())
            .map(|r| r.0.len())
            .min();
        if let Some(available) = available.filter(|&a| a < max_k) {
            log::warn!("grid asks for {max_k} n-gram features but a training split only has {available}; clamping");
        }
    }

    let units = cfg.folds * points.len();
    let results: Vec<Result<Vec<(usize, bool)>, LearnError>> = crate::par::map_range(units, |u| {
        let (f, p) = (u / points.len(), u % points.len());
        let split = &splits[f];
        let seed = cfg.seed.wrapping_add(f as u64);
        let (model, binding) = fit_on(corpus, set, points[p], &split.train, split.ranking.as_ref(), cfg, seed)?;
        Ok(split
            .test
            .iter()
            .map(|&i| {
                let x = model.space.vectorize(&corpus.pairs[i], &binding);
                (i, model.predict(&x) == corpus.pairs[i].label)
            })
            .collect())
    });

    let mut correct_by_point = vec![vec![false; corpus.len()]; points.len()];
    for (u, r) in results.into_iter().enumerate() {
        for (i, ok) in r? {
            correct_by_point[u % points.len()][i] = ok;
        }
    }
    let n = corpus.len() as f64;
    let scores: Vec<(GridPoint, f64)> = points
        .iter()
        .zip(&correct_by_point)
        .map(|(p, c)| (*p, c.iter().filter(|&&x| x).count() as f64 / n))
        .collect();
    let mut best = 0;
    for (i, (_, acc)) in scores.iter().enumerate() {
        if *acc > scores[best].1 {
            best = i;
        }
    }
    Ok(CvOutcome {
        set,
        best: scores[best].0,
        accuracy: scores[best].1,
        correct: correct_by_point.swap_remove(best),
        scores,
    })
}

/// Trains on the whole corpus at a chosen grid point.
pub fn fit(corpus: &PreparedCorpus, set: FeatureSet, point: GridPoint, cfg: &CvConfig) -> Result<Model, LearnError> {
    let all: Vec<usize> = (0..corpus.len()).collect();
    let ranking = set.uses_ngrams().then(|| {
        let ranked = rank_ngrams(corpus, &all);
        let index = RankIndex::new(&ranked, corpus.ngram_names.len());
        (ranked, index)
    });
    let (model, _) = fit_on(corpus, set, point, &all, ranking.as_ref(), cfg, cfg.seed)?;
    Ok(model)
}

/// Cross-validates, then refits the winning configuration on all pairs.
pub fn fit_best(corpus: &PreparedCorpus, set: FeatureSet, cfg: &CvConfig) -> Result<(Model, CvOutcome), LearnError> {
    let outcome = cross_validate(corpus, set, cfg)?;
    let mut model = fit(corpus, set, outcome.best, cfg)?;
    model.meta.cv_accuracy = Some(outcome.accuracy);
    model.meta.folds = Some(cfg.folds);
    Ok((model, outcome))
}
