//! Seeded generator for constructed euphonic-vs-plain pair corpora.
//!
//! The euphonic side mixes words drawn from one alliteration family (same
//! first phoneme) and one rhyme family (same final two phonemes); the plain
//! side is a length-matched draw from the whole vocabulary.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pairs::{PairCorpus, SentencePair, Side};
use crate::phonodict::{Phoneme, PronDict};

const MIN_FAMILY: usize = 4;

/// Word families extracted from a dictionary.
#[derive(Debug, Clone)]
pub struct WordFamilies {
    vocabulary: Vec<String>,
    alliterative: Vec<Vec<String>>,
    rhyming: Vec<Vec<String>>,
}

impl WordFamilies {
    /// Groups alphabetic headwords of `dict`. Returns `None` when the dictionary
    /// has no family of at least four words for either device.
    pub fn from_dict(dict: &PronDict) -> Option<Self> {
        let mut vocabulary = Vec::new();
        let mut by_onset: BTreeMap<Phoneme, Vec<String>> = BTreeMap::new();
        let mut by_coda: BTreeMap<Vec<Phoneme>, Vec<String>> = BTreeMap::new();
        for word in dict.headwords() {
            if !word.bytes().all(|b| b.is_ascii_alphabetic()) || word.len() < 2 {
                continue;
            }
            let pron = dict.lookup(word)?.phonemes();
            let lower = word.to_ascii_lowercase();
            vocabulary.push(lower.clone());
            by_onset.entry(pron[0]).or_default().push(lower.clone());
            if pron.len() >= 2 {
                by_coda.entry(pron[pron.len() - 2..].to_vec()).or_default().push(lower);
            }
        }
        let keep = |groups: Vec<Vec<String>>| -> Vec<Vec<String>> {
            groups.into_iter().filter(|g| g.len() >= MIN_FAMILY).collect()
        };
        let alliterative = keep(by_onset.into_values().collect());
        let rhyming = keep(by_coda.into_values().collect());
        if alliterative.is_empty() || rhyming.is_empty() {
            return None;
        }
        Some(Self {
            vocabulary,
            alliterative,
            rhyming,
        })
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// A sentence of `len` words built from one alliteration and one rhyme family.
    pub fn euphonic_sentence<R: Rng>(&self, len: usize, rng: &mut R) -> String {
        let allit = self.alliterative.choose(rng).expect("non-empty");
        let rhyme = self.rhyming.choose(rng).expect("non-empty");
        let mut words: Vec<&str> = (0..len)
            .map(|i| {
                let family = if i % 2 == 0 { allit } else { rhyme };
                family.choose(rng).expect("non-empty").as_str()
            })
            .collect();
        words.shuffle(rng);
        sentence_case(&words)
    }

    /// A sentence of `len` words drawn uniformly from the vocabulary.
    pub fn plain_sentence<R: Rng>(&self, len: usize, rng: &mut R) -> String {
        let words: Vec<&str> = (0..len)
            .map(|_| self.vocabulary.choose(rng).expect("non-empty").as_str())
            .collect();
        sentence_case(&words)
    }
}

impl WordFamilies {
    /// `len` words from a single rhyme family.
    pub fn rhyming_sentence<R: Rng>(&self, len: usize, rng: &mut R) -> String {
        let family = self.rhyming.choose(rng).expect("non-empty");
        let words: Vec<&str> = (0..len)
            .map(|_| family.choose(rng).expect("non-empty").as_str())
            .collect();
        sentence_case(&words)
    }

    /// One word from each of `len` distinct rhyme families (repeating families
    /// only when there are fewer than `len`).
    pub fn scattered_sentence<R: Rng>(&self, len: usize, rng: &mut R) -> String {
        let mut families: Vec<&Vec<String>> = self.rhyming.iter().collect();
        families.shuffle(rng);
        let words: Vec<&str> = (0..len)
            .map(|i| families[i % families.len()].choose(rng).expect("non-empty").as_str())
            .collect();
        sentence_case(&words)
    }
}

fn sentence_case(words: &[&str]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

/// `n` pairs whose persuasive side is the euphonic sentence, placed on a random
/// side. Sentence lengths are drawn from `5..=8` words.
pub fn euphonic_vs_plain(families: &WordFamilies, n: usize, seed: u64) -> PairCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..n)
        .map(|i| {
            let len = rng.gen_range(5..=8);
            let euphonic = families.euphonic_sentence(len, &mut rng);
            let plain = families.plain_sentence(len, &mut rng);
            let label = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            let (left, right) = match label {
                Side::Left => (euphonic, plain),
                Side::Right => (plain, euphonic),
            };
            SentencePair {
                pair_id: format!("syn{i:05}"),
                left,
                right,
                label,
            }
        })
        .collect();
    PairCorpus::new("synthetic", pairs)
}

/// `n` pairs that differ only in rhyme: the persuasive side draws every word
/// from one rhyme family, the other draws each word from a different family.
/// Every family is equally likely to contribute a word to either side, so
/// unigram presence carries no label signal in expectation.
pub fn rhyme_vs_scattered(families: &WordFamilies, n: usize, seed: u64) -> PairCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..n)
        .map(|i| {
            let len = rng.gen_range(4..=6);
            let rhyming = families.rhyming_sentence(len, &mut rng);
            let scattered = families.scattered_sentence(len, &mut rng);
            let label = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            let (left, right) = match label {
                Side::Left => (rhyming, scattered),
                Side::Right => (scattered, rhyming),
            };
            SentencePair {
                pair_id: format!("rhy{i:05}"),
                left,
                right,
                label,
            }
        })
        .collect();
    PairCorpus::new("synthetic-rhyme", pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> PronDict {
        PronDict::parse(include_str!("../../assets/cmudict-fixture.dict")).unwrap()
    }

    #[test]
    fn generator_is_deterministic_and_balanced_enough() {
        let fam = WordFamilies::from_dict(&dict()).unwrap();
        let a = euphonic_vs_plain(&fam, 50, 9);
        let b = euphonic_vs_plain(&fam, 50, 9);
        assert_eq!(a, b);
        let (l, r) = a.label_counts();
        assert!(l > 10 && r > 10);
        assert_ne!(a, euphonic_vs_plain(&fam, 50, 10));
    }

    #[test]
    fn lengths_match() {
        let fam = WordFamilies::from_dict(&dict()).unwrap();
        for p in euphonic_vs_plain(&fam, 20, 1).pairs {
            assert_eq!(p.left.split(' ').count(), p.right.split(' ').count());
        }
    }

    #[test]
    fn tiny_dict_has_no_families() {
        let d = PronDict::parse("CAT  K AE1 T\nDOG  D AO1 G\n").unwrap();
        assert!(WordFamilies::from_dict(&d).is_none());
    }
}
