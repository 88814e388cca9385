//! Trained pairwise classifiers and their JSON container.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{FeatureSpace, PairFeatureVector, SparseVec, TextPipeline};
use super::svm::{self, SolverOptions, EXPLICIT_QUADRATIC_MAX_DIM};
use super::LearnError;
use crate::corpus::{SentencePair, Side, Stopwords, TextMode};
use crate::phonodict::PronDict;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExplicitMap {
    Linear,
    Quadratic,
}

impl ExplicitMap {
    pub fn apply(self, x: &SparseVec, dim: usize) -> SparseVec {
        match self {
            ExplicitMap::Linear => svm::linear_map(x, dim),
            ExplicitMap::Quadratic => svm::quadratic_map(x, dim),
        }
    }

    pub fn output_dim(self, dim: usize) -> usize {
        match self {
            ExplicitMap::Linear => dim + 1,
            ExplicitMap::Quadratic => svm::quadratic_dim(dim),
        }
    }
}

/// Decision function parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum Decision {
    /// `w . phi(x)` over an explicit feature map.
    Primal { map: ExplicitMap, weights: Vec<f64> },
    /// `sum_i coef_i (s_i . x + 1)^degree`.
    Dual { support: Vec<SparseVec>, coef: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub dataset: String,
    pub seed: u64,
    pub c: f64,
    pub tolerance: f64,
    pub text_mode: TextMode,
    pub stopwords: Vec<String>,
    pub instances: usize,
    pub cv_accuracy: Option<f64>,
    pub folds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub format_version: u32,
    /// Free-form run metadata recorded by the caller.
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
    pub space: FeatureSpace,
    pub kernel_degree: u8,
    pub decision: Decision,
    /// Every training vector was empty, so the model is a constant.
    pub degenerate: bool,
    pub meta: TrainingMeta,
}

/// Training settings for a single model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainParams {
    pub degree: u8,
    pub c: f64,
    pub solver: SolverOptions,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            degree: 1,
            c: 1.0,
            solver: SolverOptions::default(),
        }
    }
}

fn sign(label: Side) -> f64 {
    match label {
        Side::Left => 1.0,
        Side::Right => -1.0,
    }
}

/// Trains on vectors laid out by `space`.
pub fn train(
    vectors: &[PairFeatureVector],
    space: FeatureSpace,
    params: &TrainParams,
    meta: TrainingMeta,
) -> Result<Model, LearnError> {
    if !(1..=2).contains(&params.degree) {
        return Err(LearnError::UnsupportedDegree(params.degree));
    }
    let ys: Vec<f64> = vectors.iter().map(|v| sign(v.label)).collect();
    let degenerate = vectors.iter().all(|v| v.values.nnz() == 0);
    let dim = space.dim();

    let explicit = match params.degree {
        1 => Some(ExplicitMap::Linear),
        _ if dim <= EXPLICIT_QUADRATIC_MAX_DIM => Some(ExplicitMap::Quadratic),
        _ => None,
    };
    let decision = match explicit {
        Some(map) => {
            let mapped: Vec<SparseVec> = vectors.iter().map(|v| map.apply(&v.values, dim)).collect();
            let weights = svm::train_primal(&mapped, &ys, map.output_dim(dim), params.c, &params.solver)?;
            Decision::Primal { map, weights }
        }
        None => {
            let xs: Vec<SparseVec> = vectors.iter().map(|v| v.values.clone()).collect();
            let coef = svm::train_dual(&xs, &ys, params.degree, params.c, &params.solver)?;
            let (support, coef) = xs.into_iter().zip(coef).filter(|(_, a)| *a != 0.0).unzip();
            Decision::Dual { support, coef }
        }
    };
    if degenerate {
        log::warn!("all training vectors are empty; model `{}` is constant", space.set);
    }
    Ok(Model {
        format_version: MODEL_FORMAT_VERSION,
        provenance: BTreeMap::new(),
        space,
        kernel_degree: params.degree,
        decision,
        degenerate,
        meta: TrainingMeta {
            instances: vectors.len(),
            ..meta
        },
    })
}

impl Model {
    pub fn selected_k(&self) -> usize {
        self.space.ngrams.len()
    }

    pub fn decision_value(&self, x: &SparseVec) -> f64 {
        match &self.decision {
            Decision::Primal { map, weights } => map.apply(x, self.space.dim()).dot_dense(weights),
            Decision::Dual { support, coef } => support
                .iter()
                .zip(coef)
                .map(|(s, a)| a * svm::poly_kernel(s, x, self.kernel_degree))
                .sum(),
        }
    }

    /// Ties go to the left side.
    pub fn predict(&self, x: &SparseVec) -> Side {
        if self.decision_value(x) >= 0.0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn pipeline(&self) -> TextPipeline {
        TextPipeline {
            mode: self.meta.text_mode,
            stopwords: Stopwords::from_words(&self.meta.stopwords),
        }
    }

    /// Predicts the persuasive side of a raw pair.
    pub fn predict_pair(&self, pair: &SentencePair, dict: &PronDict) -> Side {
        let v = self.space.vectorize_text(pair, dict, &self.pipeline());
        self.predict(&v.values)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        let model: Model = serde_json::from_str(text).map_err(|e| LearnError::ModelFormat(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(LearnError::ModelFormat(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LearnError> {
        fs::write(path.as_ref(), self.to_json()).map_err(|e| LearnError::Io(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LearnError> {
        let text = fs::read_to_string(path.as_ref()).map_err(|e| LearnError::Io(e.to_string()))?;
        Self::from_json(&text)
    }
}
