//! Sentence-level euphony scores computed from dictionary pronunciations.
//!
//! All four scores are normalized by the sentence's total phoneme count
//! `t_ph`, so each lies in `[0, 1]`. A sentence without any in-dictionary word
//! scores zero everywhere.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{scoring_tokens, TextMode};
use crate::phonodict::{Phoneme, PronDict, Pronunciation};

/// The four sound devices, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Rhyme,
    Alliteration,
    Plosive,
    Homogeneity,
}

impl Device {
    pub const ALL: [Device; 4] = [
        Device::Rhyme,
        Device::Alliteration,
        Device::Plosive,
        Device::Homogeneity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Device::Rhyme => "rhyme",
            Device::Alliteration => "alliteration",
            Device::Plosive => "plosive",
            Device::Homogeneity => "homogeneity",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Device::Rhyme => "rh",
            Device::Alliteration => "al",
            Device::Plosive => "pl",
            Device::Homogeneity => "ho",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Device {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Device::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s) || d.short().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown device `{s}`"))
    }
}

/// In-dictionary words of a sentence, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentencePhonemes {
    pub words: Vec<Pronunciation>,
    pub flat: Vec<Phoneme>,
    pub oov_tokens: usize,
}

impl SentencePhonemes {
    pub fn from_words(words: Vec<Pronunciation>) -> Self {
        let flat = words.iter().flat_map(|w| w.phonemes().iter().copied()).collect();
        Self {
            words,
            flat,
            oov_tokens: 0,
        }
    }

    pub fn total_phonemes(&self) -> usize {
        self.flat.len()
    }

    pub fn distinct_phonemes(&self) -> usize {
        self.flat.iter().collect::<HashSet<_>>().len()
    }
}

/// Looks up each token; unknown words are counted, tags and punctuation skipped.
pub fn phonemize<S: AsRef<str>>(tokens: &[S], dict: &PronDict) -> SentencePhonemes {
    let mut words = Vec::with_capacity(tokens.len());
    let mut oov = 0;
    for tok in tokens {
        let tok = tok.as_ref();
        if tok.starts_with('_') || !tok.bytes().any(|b| b.is_ascii_alphanumeric()) {
            continue;
        }
        match dict.lookup(tok) {
            Some(p) => words.push(p.clone()),
            None => oov += 1,
        }
    }
    let mut sp = SentencePhonemes::from_words(words);
    sp.oov_tokens = oov;
    sp
}

fn ratio(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

pub fn plosive_score(sp: &SentencePhonemes) -> f64 {
    let plosives = sp.flat.iter().filter(|p| p.is_plosive()).count();
    ratio(plosives, sp.total_phonemes())
}

/// `1 - distinct / total` over the flattened phoneme sequence.
pub fn homogeneity_score(sp: &SentencePhonemes) -> f64 {
    let total = sp.total_phonemes();
    if total == 0 {
        return 0.0;
    }
    1.0 - sp.distinct_phonemes() as f64 / total as f64
}

/// For each word, the length of its longest prefix shared with any other word
/// in the sentence; the sum is divided by `t_ph`.
pub fn alliteration_score(sp: &SentencePhonemes) -> f64 {
    shared_edge_score(sp, |a, b| a.iter().zip(b).take_while(|(x, y)| x == y).count())
}

/// Suffix counterpart of [`alliteration_score`].
pub fn rhyme_score(sp: &SentencePhonemes) -> f64 {
    shared_edge_score(sp, |a, b| {
        a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
    })
}

fn shared_edge_score(sp: &SentencePhonemes, common: impl Fn(&[Phoneme], &[Phoneme]) -> usize) -> f64 {
    if sp.words.len() < 2 {
        return 0.0;
    }
    let total: usize = sp
        .words
        .iter()
        .enumerate()
        .map(|(i, wi)| {
            sp.words
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, wj)| common(wi.phonemes(), wj.phonemes()))
                .max()
                .unwrap_or(0)
        })
        .sum();
    ratio(total, sp.total_phonemes())
}

/// All four scores for one sentence plus coverage diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhoneticProfile {
    pub rhyme: f64,
    pub alliteration: f64,
    pub plosive: f64,
    pub homogeneity: f64,
    pub total_phonemes: usize,
    pub distinct_phonemes: usize,
    pub oov_tokens: usize,
    pub covered_tokens: usize,
}

impl PhoneticProfile {
    pub fn from_phonemes(sp: &SentencePhonemes) -> Self {
        Self {
            rhyme: rhyme_score(sp),
            alliteration: alliteration_score(sp),
            plosive: plosive_score(sp),
            homogeneity: homogeneity_score(sp),
            total_phonemes: sp.total_phonemes(),
            distinct_phonemes: sp.distinct_phonemes(),
            oov_tokens: sp.oov_tokens,
            covered_tokens: sp.words.len(),
        }
    }

    pub fn get(&self, device: Device) -> f64 {
        match device {
            Device::Rhyme => self.rhyme,
            Device::Alliteration => self.alliteration,
            Device::Plosive => self.plosive,
            Device::Homogeneity => self.homogeneity,
        }
    }

    /// Scores in [`Device::ALL`] order.
    pub fn scores(&self) -> [f64; 4] {
        Device::ALL.map(|d| self.get(d))
    }
}

/// Normalizes, phonemizes and scores a raw sentence.
pub fn score_sentence(text: &str, dict: &PronDict) -> PhoneticProfile {
    score_sentence_in(text, TextMode::Generic, dict)
}

pub fn score_sentence_in(text: &str, mode: TextMode, dict: &PronDict) -> PhoneticProfile {
    let tokens = scoring_tokens(text, mode);
    PhoneticProfile::from_phonemes(&phonemize(&tokens, dict))
}

/// Scores many sentences, in parallel when the feature is enabled.
pub fn score_all<S: AsRef<str> + Sync>(texts: &[S], mode: TextMode, dict: &PronDict) -> Vec<PhoneticProfile> {
    crate::par::map(texts, |t| score_sentence_in(t.as_ref(), mode, dict))
}
