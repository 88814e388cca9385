//! Information-gain ranking of binary n-gram columns.

use std::cmp::Ordering;

use super::features::{tagged_name, Binding, FeatureSpace, PreparedCorpus};
use super::FeatureSet;
use crate::corpus::Side;

fn entropy2(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    let p = pos / total;
    h(p) + h(1.0 - p)
}

/// IG in bits from counts: `n` instances, `n_pos` positive, `f` with the
/// feature present, `f_pos` of those positive.
pub fn ig_from_counts(n: u64, n_pos: u64, f: u64, f_pos: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (n, n_pos, f, f_pos) = (n as f64, n_pos as f64, f as f64, f_pos as f64);
    let absent = n - f;
    let absent_pos = n_pos - f_pos;
    let conditional = (f / n) * entropy2(f_pos, f) + (absent / n) * entropy2(absent_pos, absent);
    (entropy2(n_pos, n) - conditional).max(0.0)
}

/// `H(label) - H(label | feature)` with empirical probabilities.
pub fn information_gain(feature: &[bool], labels: &[bool]) -> f64 {
    let n = feature.len().min(labels.len()) as u64;
    let mut n_pos = 0;
    let mut f = 0;
    let mut f_pos = 0;
    for (&x, &y) in feature.iter().zip(labels) {
        n_pos += y as u64;
        f += x as u64;
        f_pos += (x && y) as u64;
    }
    ig_from_counts(n, n_pos, f, f_pos)
}

/// A side-tagged n-gram with its training-split gain.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub side: Side,
    pub ngram: u32,
    pub gain: f64,
}

/// Ranks every n-gram column seen in the `train` pairs, best first. Ties go
/// to the lexicographically smaller side-tagged name.
pub fn rank_ngrams(corpus: &PreparedCorpus, train: &[usize]) -> Vec<RankedFeature> {
    let vocab = corpus.ngram_names.len();
    // Column 2 * id + side.
    let mut present = vec![0u64; 2 * vocab];
    let mut present_pos = vec![0u64; 2 * vocab];
    let mut n_pos = 0u64;
    for &i in train {
        let pair = &corpus.pairs[i];
        let pos = pair.label == Side::Left;
        n_pos += pos as u64;
        for (s, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            for &id in &pair.side(side).ngrams {
                let col = 2 * id as usize + s;
                present[col] += 1;
                present_pos[col] += pos as u64;
            }
        }
    }
    let n = train.len() as u64;
    let mut ranked: Vec<RankedFeature> = (0..2 * vocab)
        .filter(|&col| present[col] > 0)
        .map(|col| RankedFeature {
            side: if col % 2 == 0 { Side::Left } else { Side::Right },
            ngram: (col / 2) as u32,
            gain: ig_from_counts(n, n_pos, present[col], present_pos[col]),
        })
        .collect();
    let names = &corpus.ngram_names;
    ranked.sort_by(|a, b| {
        b.gain
            .partial_cmp(&a.gain)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.side.cmp(&b.side))
            .then_with(|| names[a.ngram as usize].cmp(&names[b.ngram as usize]))
    });
    ranked
}

/// The first `k` ranked features as a fitted space. `k` larger than the
/// ranking is clamped with a warning.
pub fn select_top_k(set: FeatureSet, ranked: &[RankedFeature], names: &[String], k: usize) -> FeatureSpace {
    if !set.uses_ngrams() {
        return FeatureSpace::new(set, Vec::new());
    }
    if k > ranked.len() {
        log::warn!("requested {k} features but only {} are available", ranked.len());
    }
    let ngrams = ranked
        .iter()
        .take(k)
        .map(|r| (r.side, names[r.ngram as usize].clone()))
        .collect();
    FeatureSpace::new(set, ngrams)
}

/// Rank position of every column, for cheap top-k bindings.
pub(crate) struct RankIndex {
    position: Vec<[Option<u32>; 2]>,
}

impl RankIndex {
    pub fn new(ranked: &[RankedFeature], vocab: usize) -> Self {
        let mut position = vec![[None, None]; vocab];
        for (pos, r) in ranked.iter().enumerate() {
            let s = if r.side == Side::Left { 0 } else { 1 };
            position[r.ngram as usize][s] = Some(pos as u32);
        }
        Self { position }
    }

    /// Binding for the top `k` columns; equals `select_top_k(..).bind(names)`.
    pub fn binding(&self, k: usize) -> Binding {
        let k = k as u32;
        Binding::from_columns(
            self.position
                .iter()
                .map(|slots| slots.map(|p| p.filter(|&p| p < k)))
                .collect(),
        )
    }
}

/// Display names of ranked features, for reports and debugging.
pub fn ranked_names(ranked: &[RankedFeature], names: &[String]) -> Vec<String> {
    ranked
        .iter()
        .map(|r| tagged_name(r.side, &names[r.ngram as usize]))
        .collect()
}
