//! Within-dataset, ablation and cross-dataset classification experiments.

use std::fmt::Write as _;

use super::cv::{cross_validate, fit_best, CvConfig, CvOutcome, GridPoint};
use super::features::{FeatureSet, PreparedCorpus};
use super::model::Model;
use super::LearnError;
use crate::scorer::Device;
use crate::stats::{binomial_test, mcnemar, TestResult};

/// Phonetic, n-gram and combined models on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct WithinResult {
    pub dataset: String,
    pub instances: usize,
    pub phonetic: CvOutcome,
    pub ngram: CvOutcome,
    pub all: CvOutcome,
    /// Exact binomial test of the phonetic accuracy against 0.5.
    pub phonetic_vs_chance: TestResult,
    /// McNemar, n-gram against phonetic.
    pub ngram_vs_phonetic: TestResult,
    /// McNemar, combined against n-gram.
    pub all_vs_ngram: TestResult,
}

impl WithinResult {
    /// Outcomes with the test reported for each, in table order.
    pub fn rows(&self) -> [(&CvOutcome, &TestResult); 3] {
        [
            (&self.phonetic, &self.phonetic_vs_chance),
            (&self.ngram, &self.ngram_vs_phonetic),
            (&self.all, &self.all_vs_ngram),
        ]
    }
}

fn correct_count(outcome: &CvOutcome) -> u64 {
    outcome.correct.iter().filter(|&&c| c).count() as u64
}

pub fn within_dataset(corpus: &PreparedCorpus, cfg: &CvConfig) -> Result<WithinResult, LearnError> {
    let phonetic = cross_validate(corpus, FeatureSet::Phonetic, cfg)?;
    let ngram = cross_validate(corpus, FeatureSet::Ngram, cfg)?;
    let all = cross_validate(corpus, FeatureSet::All, cfg)?;
    Ok(WithinResult {
        dataset: corpus.name.clone(),
        instances: corpus.len(),
        phonetic_vs_chance: binomial_test(correct_count(&phonetic), corpus.len() as u64, 0.5)?,
        ngram_vs_phonetic: mcnemar(&ngram.correct, &phonetic.correct)?,
        all_vs_ngram: mcnemar(&all.correct, &ngram.correct)?,
        phonetic,
        ngram,
        all,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationVariant {
    pub device: Device,
    pub outcome: CvOutcome,
    /// McNemar against the n-gram baseline.
    pub vs_baseline: TestResult,
}

/// N-grams alone against n-grams plus each single device.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationResult {
    pub dataset: String,
    pub instances: usize,
    pub baseline: CvOutcome,
    pub variants: Vec<AblationVariant>,
}

pub fn ablation(corpus: &PreparedCorpus, cfg: &CvConfig) -> Result<AblationResult, LearnError> {
    let baseline = cross_validate(corpus, FeatureSet::Ngram, cfg)?;
    let variants = Device::ALL
        .into_iter()
        .map(|device| {
            let outcome = cross_validate(corpus, FeatureSet::NgramWith(device), cfg)?;
            let vs_baseline = mcnemar(&outcome.correct, &baseline.correct)?;
            Ok(AblationVariant {
                device,
                outcome,
                vs_baseline,
            })
        })
        .collect::<Result<_, LearnError>>()?;
    Ok(AblationResult {
        dataset: corpus.name.clone(),
        instances: corpus.len(),
        baseline,
        variants,
    })
}

/// One train-on-A, test-on-B evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCell {
    pub train: String,
    pub test: String,
    pub set: FeatureSet,
    pub point: GridPoint,
    pub cv_accuracy: f64,
    pub accuracy: f64,
    pub test_instances: usize,
    /// Train and test are the same dataset; accuracy is training accuracy.
    pub sanity: bool,
}

/// Fits each feature set once on `train` (grid chosen by cross-validation)
/// and scores it on every symmetrized corpus in `tests`. A test corpus named
/// like the training one is refused unless `allow_same` is set.
pub fn cross_dataset(
    train: &PreparedCorpus,
    tests: &[&PreparedCorpus],
    sets: &[FeatureSet],
    cfg: &CvConfig,
    allow_same: bool,
) -> Result<(Vec<CrossCell>, Vec<Model>), LearnError> {
    for test in tests {
        if test.name == train.name && !allow_same {
            return Err(LearnError::SameDataset(train.name.clone()));
        }
        if !test.symmetrized {
            return Err(LearnError::NotSymmetrized(test.name.clone()));
        }
    }
    let mut cells = Vec::new();
    let mut models = Vec::new();
    for &set in sets {
        let (model, outcome) = fit_best(train, set, cfg)?;
        for test in tests {
            cells.push(CrossCell {
                train: train.name.clone(),
                test: test.name.clone(),
                set,
                point: outcome.best,
                cv_accuracy: outcome.accuracy,
                accuracy: evaluate(&model, test),
                test_instances: test.len(),
                sanity: test.name == train.name,
            });
        }
        models.push(model);
    }
    Ok((cells, models))
}

/// Accuracy of `model` on every pair of `corpus`.
pub fn evaluate(model: &Model, corpus: &PreparedCorpus) -> f64 {
    if corpus.is_empty() {
        return 0.0;
    }
    let binding = model.space.bind(&corpus.ngram_names);
    let correct = crate::par::map(&corpus.pairs, |p| {
        model.predict(&model.space.vectorize(p, &binding)) == p.label
    })
    .into_iter()
    .filter(|&c| c)
    .count();
    correct as f64 / corpus.len() as f64
}

fn k_field(point: &GridPoint) -> String {
    point.k.map_or_else(|| "-".to_string(), |k| k.to_string())
}

/// `0.826*** (3k, 1)`.
pub fn annotate(accuracy: f64, test: Option<&TestResult>, point: &GridPoint) -> String {
    let tier = test.map_or(String::new(), |t| t.tier.to_string());
    format!("{accuracy:.3}{tier} {}", point.annotation())
}

const OUTCOME_HEADER: &str = "dataset\tinstances\tfeatures\taccuracy\tdegree\tk\tc\tcompared_to\tstatistic\tp\ttier";

fn outcome_line(out: &mut String, dataset: &str, n: usize, o: &CvOutcome, against: &str, t: &TestResult) {
    let _ = writeln!(
        out,
        "{dataset}\t{n}\t{}\t{:.6}\t{}\t{}\t{}\t{against}\t{:.6}\t{:.6e}\t{}",
        o.set,
        o.accuracy,
        o.best.degree,
        k_field(&o.best),
        o.best.c,
        t.statistic,
        t.p_raw,
        t.tier
    );
}

pub fn within_tsv(results: &[WithinResult]) -> String {
    let mut out = format!("{OUTCOME_HEADER}\n");
    for r in results {
        let against = ["chance", "phonetic", "ngram"];
        for ((o, t), a) in r.rows().into_iter().zip(against) {
            outcome_line(&mut out, &r.dataset, r.instances, o, a, t);
        }
    }
    out
}

pub fn ablation_tsv(results: &[AblationResult]) -> String {
    let mut out = format!("{OUTCOME_HEADER}\n");
    for r in results {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{}\t{}\t{}\t-\t-\t-\t-",
            r.dataset,
            r.instances,
            r.baseline.set,
            r.baseline.accuracy,
            r.baseline.best.degree,
            k_field(&r.baseline.best),
            r.baseline.best.c
        );
        for v in &r.variants {
            outcome_line(&mut out, &r.dataset, r.instances, &v.outcome, "ngram", &v.vs_baseline);
        }
    }
    out
}

pub fn cross_tsv(cells: &[CrossCell]) -> String {
    let mut out = String::from("train\ttest\tfeatures\taccuracy\tcv_accuracy\tdegree\tk\tc\ttest_instances\tsanity\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}\t{}",
            c.train,
            c.test,
            c.set,
            c.accuracy,
            c.cv_accuracy,
            c.point.degree,
            k_field(&c.point),
            c.point.c,
            c.test_instances,
            u8::from(c.sanity)
        );
    }
    out
}

/// Every grid point's cross-validated accuracy.
pub fn grid_tsv<'a>(outcomes: impl IntoIterator<Item = (&'a str, &'a CvOutcome)>) -> String {
    let mut out = String::from("dataset\tfeatures\tdegree\tk\tc\taccuracy\tselected\n");
    for (dataset, o) in outcomes {
        for (p, acc) in &o.scores {
            let _ = writeln!(
                out,
                "{dataset}\t{}\t{}\t{}\t{}\t{acc:.6}\t{}",
                o.set,
                p.degree,
                k_field(p),
                p.c,
                u8::from(*p == o.best)
            );
        }
    }
    out
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(header).chain(rows.iter().map(Vec::as_slice)) {
        let mut line = String::new();
        for (i, (cell, w)) in r.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(line, "{cell:<w$}");
            } else {
                let _ = write!(line, "  {cell:>w$}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn within_text(results: &[WithinResult]) -> String {
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = vec![r.dataset.clone()];
            row.extend(r.rows().iter().map(|(o, t)| annotate(o.accuracy, Some(t), &o.best)));
            row
        })
        .collect();
    let mut out = String::from(
        "Cross-validated accuracy (phonetic vs chance: binomial; ngram vs phonetic, all vs ngram: McNemar)\n",
    );
    out.push_str(&table(&strings(&["dataset", "phonetic", "ngram", "all"]), &rows));
    out
}

pub fn ablation_text(results: &[AblationResult]) -> String {
    let mut header = strings(&["dataset", "ngram"]);
    header.extend(Device::ALL.iter().map(|d| format!("+{}", d.name())));
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = vec![r.dataset.clone(), annotate(r.baseline.accuracy, None, &r.baseline.best)];
            row.extend(
                r.variants
                    .iter()
                    .map(|v| annotate(v.outcome.accuracy, Some(&v.vs_baseline), &v.outcome.best)),
            );
            row
        })
        .collect();
    let mut out = String::from("Feature ablation (McNemar against n-grams alone)\n");
    out.push_str(&table(&header, &rows));
    out
}

pub fn cross_text(cells: &[CrossCell]) -> String {
    let mut sets: Vec<FeatureSet> = cells.iter().map(|c| c.set).collect();
    sets.sort();
    sets.dedup();
    let mut header = strings(&["train -> test"]);
    header.extend(sets.iter().map(|s| s.label()));
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for c in cells {
        if !keys.contains(&(c.train.as_str(), c.test.as_str())) {
            keys.push((&c.train, &c.test));
        }
    }
    let rows: Vec<Vec<String>> = keys
        .iter()
        .map(|(tr, te)| {
            let flag = if tr == te { " (sanity)" } else { "" };
            let mut row = vec![format!("{tr} -> {te}{flag}")];
            for s in &sets {
                row.push(
                    cells
                        .iter()
                        .find(|c| c.train == *tr && c.test == *te && c.set == *s)
                        .map_or("-".to_string(), |c| annotate(c.accuracy, None, &c.point)),
                );
            }
            row
        })
        .collect();
    let mut out = String::from("Cross-dataset accuracy\n");
    out.push_str(&table(&header, &rows));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PairCorpus, SentencePair, Side};
    use crate::learner::cv::Grid;
    use crate::learner::features::TextPipeline;
    use crate::phonodict::PronDict;

    fn prepared(name: &str, n: usize, offset: usize) -> PreparedCorpus {
        let pairs = (0..n)
            .map(|i| SentencePair {
                pair_id: format!("p{i}"),
                left: format!("winner w{} shines", i + offset),
                right: format!("plain w{} text", i + offset + 5000),
                label: if i % 3 == 0 { Side::Right } else { Side::Left },
            })
            .map(|p| {
                if p.label == Side::Right {
                    SentencePair {
                        left: p.right,
                        right: p.left,
                        ..p
                    }
                } else {
                    p
                }
            })
            .collect();
        let c = PairCorpus::new(name, pairs).symmetrize().unwrap();
        PreparedCorpus::build(&c, &PronDict::default(), &TextPipeline::default())
    }

    fn small_cfg() -> CvConfig {
        CvConfig {
            folds: 5,
            ngram_grid: Grid {
                degrees: vec![1],
                feature_counts: vec![2, 20],
                c_values: vec![1.0],
            },
            ..CvConfig::default()
        }
    }

    #[test]
    fn within_and_rendering_are_deterministic() {
        let c = prepared("toy", 30, 0);
        let a = within_dataset(&c, &small_cfg()).unwrap();
        let b = within_dataset(&c, &small_cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.ngram.accuracy, 1.0);
        // The dictionary is empty, so phonetic vectors are all zero.
        assert_eq!(a.phonetic.accuracy, 0.5);
        assert_eq!(within_tsv(std::slice::from_ref(&a)), within_tsv(&[b]));
        let text = within_text(&[a]);
        assert!(text.contains("1.000*** (2, 1)"), "{text}");
    }

    #[test]
    fn cross_refuses_same_dataset_without_sanity_flag() {
        let a = prepared("a", 20, 0);
        let b = prepared("b", 20, 100);
        let cfg = small_cfg();
        assert!(matches!(
            cross_dataset(&a, &[&a], &[FeatureSet::Ngram], &cfg, false),
            Err(LearnError::SameDataset(_))
        ));
        let (sanity, _) = cross_dataset(&a, &[&a], &[FeatureSet::Ngram], &cfg, true).unwrap();
        assert_eq!(sanity[0].accuracy, 1.0);
        assert!(sanity[0].sanity);
        let (cells, models) = cross_dataset(&a, &[&b], &[FeatureSet::Ngram], &cfg, false).unwrap();
        assert_eq!(models.len(), 1);
        // Shared words carry over to the unseen dataset.
        assert_eq!(cells[0].accuracy, 1.0);
        assert!(cross_text(&cells).contains("a -> b"));
        assert!(cross_text(&sanity).contains("a -> a (sanity)"));
    }

    #[test]
    fn ablation_covers_each_device() {
        let c = prepared("toy", 20, 0);
        let r = ablation(&c, &small_cfg()).unwrap();
        assert_eq!(r.variants.len(), 4);
        assert_eq!(ablation_tsv(std::slice::from_ref(&r)).lines().count(), 6);
        assert!(ablation_text(&[r]).contains("+homogeneity"));
    }
}
