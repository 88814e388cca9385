//! Sentence features and the side-tagged pair representation.
//!
//! A pair vector is the concatenation of left and right blocks. N-gram
//! columns come first (binary presence, names like `L|2:the_big`), followed
//! by the phonetic scores of the left sentence, then of the right one.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize, PairCorpus, SentencePair, Side, Stopwords, TextMode};
use crate::phonodict::PronDict;
use crate::scorer::{score_sentence_in, Device, PhoneticProfile};

/// Unigrams (stopwords removed), plus bigrams and trigrams over the unfiltered
/// token stream. Names are prefixed with the n-gram order.
pub fn extract_ngrams<S: AsRef<str>>(tokens: &[S], stopwords: &Stopwords) -> BTreeSet<String> {
    let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let mut out = BTreeSet::new();
    for t in &toks {
        if !stopwords.contains(t) {
            out.insert(format!("1:{t}"));
        }
    }
    for w in toks.windows(2) {
        out.insert(format!("2:{}_{}", w[0], w[1]));
    }
    for w in toks.windows(3) {
        out.insert(format!("3:{}_{}_{}", w[0], w[1], w[2]));
    }
    out
}

/// Which features a model sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Phonetic,
    Ngram,
    All,
    /// N-grams plus a single phonetic device.
    NgramWith(Device),
}

impl FeatureSet {
    pub const MAIN: [FeatureSet; 3] = [FeatureSet::Phonetic, FeatureSet::Ngram, FeatureSet::All];

    pub fn uses_ngrams(self) -> bool {
        !matches!(self, FeatureSet::Phonetic)
    }

    pub fn devices(self) -> Vec<Device> {
        match self {
            FeatureSet::Phonetic | FeatureSet::All => Device::ALL.to_vec(),
            FeatureSet::Ngram => Vec::new(),
            FeatureSet::NgramWith(d) => vec![d],
        }
    }

    pub fn label(self) -> String {
        match self {
            FeatureSet::Phonetic => "phonetic".into(),
            FeatureSet::Ngram => "ngram".into(),
            FeatureSet::All => "all".into(),
            FeatureSet::NgramWith(d) => format!("ngram+{}", d.name()),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phonetic" => Ok(FeatureSet::Phonetic),
            "ngram" => Ok(FeatureSet::Ngram),
            "all" => Ok(FeatureSet::All),
            other => other
                .strip_prefix("ngram+")
                .ok_or_else(|| format!("unknown feature set `{other}`"))?
                .parse()
                .map(FeatureSet::NgramWith),
        }
    }
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub idx: Vec<u32>,
    pub val: Vec<f64>,
}

impl SparseVec {
    /// Builds from unordered entries; zero values are dropped.
    pub fn from_entries(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        entries.dedup_by_key(|e| e.0);
        let (idx, val) = entries.into_iter().filter(|e| e.1 != 0.0).unzip();
        Self { idx, val }
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.idx.iter().copied().zip(self.val.iter().copied())
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j, mut s) = (0, 0, 0.0);
        while i < self.idx.len() && j < other.idx.len() {
            match self.idx[i].cmp(&other.idx[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    s += self.val[i] * other.val[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        s
    }

    pub fn dot_dense(&self, w: &[f64]) -> f64 {
        self.iter()
            .map(|(i, v)| w.get(i as usize).copied().unwrap_or(0.0) * v)
            .sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.val.iter().map(|v| v * v).sum()
    }
}

/// A labelled pair vector. `label` is the persuasive side.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFeatureVector {
    pub values: SparseVec,
    pub label: Side,
}

/// Per-sentence material every feature set is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceFeatures {
    /// Interned n-gram ids, ascending.
    pub ngrams: Vec<u32>,
    pub profile: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct PreparedPair {
    /// Dense id shared by a pair and its swapped twin.
    pub group: u32,
    pub label: Side,
    pub left: SentenceFeatures,
    pub right: SentenceFeatures,
}

impl PreparedPair {
    pub fn side(&self, side: Side) -> &SentenceFeatures {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// Options shared by corpus preparation and model prediction.
#[derive(Debug, Clone)]
pub struct TextPipeline {
    pub mode: TextMode,
    pub stopwords: Stopwords,
}

impl Default for TextPipeline {
    fn default() -> Self {
        Self {
            mode: TextMode::Generic,
            stopwords: Stopwords::default(),
        }
    }
}

impl TextPipeline {
    pub fn sentence_ngrams(&self, text: &str) -> BTreeSet<String> {
        extract_ngrams(&normalize(text, self.mode).tokens, &self.stopwords)
    }

    pub fn profile(&self, text: &str, dict: &PronDict) -> PhoneticProfile {
        score_sentence_in(text, self.mode, dict)
    }
}

/// A corpus with every sentence featurized once.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub name: String,
    pub symmetrized: bool,
    /// N-gram names indexed by interned id.
    pub ngram_names: Vec<String>,
    pub pairs: Vec<PreparedPair>,
    pub group_count: usize,
}

impl PreparedCorpus {
    pub fn build(corpus: &PairCorpus, dict: &PronDict, pipeline: &TextPipeline) -> Self {
        // Unique sentences in first-appearance order.
        let mut sentence_ids: HashMap<&str, usize> = HashMap::new();
        let mut sentences: Vec<&str> = Vec::new();
        for p in &corpus.pairs {
            for s in [p.left.as_str(), p.right.as_str()] {
                sentence_ids.entry(s).or_insert_with(|| {
                    sentences.push(s);
                    sentences.len() - 1
                });
            }
        }

        let raw: Vec<(BTreeSet<String>, PhoneticProfile)> =
            crate::par::map(&sentences, |s| (pipeline.sentence_ngrams(s), pipeline.profile(s, dict)));

        let mut names: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, u32> = HashMap::new();
        let features: Vec<SentenceFeatures> = raw
            .into_iter()
            .map(|(grams, profile)| {
                let mut ids: Vec<u32> = grams
                    .into_iter()
                    .map(|g| {
                        *lookup.entry(g).or_insert_with_key(|g| {
                            names.push(g.clone());
                            (names.len() - 1) as u32
                        })
                    })
                    .collect();
                ids.sort_unstable();
                SentenceFeatures {
                    ngrams: ids,
                    profile: profile.scores(),
                }
            })
            .collect();

        let mut groups: HashMap<&str, u32> = HashMap::new();
        let pairs = corpus
            .pairs
            .iter()
            .map(|p| {
                let next = groups.len() as u32;
                let group = *groups.entry(p.group_id()).or_insert(next);
                PreparedPair {
                    group,
                    label: p.label,
                    left: features[sentence_ids[p.left.as_str()]].clone(),
                    right: features[sentence_ids[p.right.as_str()]].clone(),
                }
            })
            .collect();

        Self {
            name: corpus.name.clone(),
            symmetrized: corpus.symmetrized,
            ngram_names: names,
            pairs,
            group_count: groups.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn labels(&self) -> Vec<Side> {
        self.pairs.iter().map(|p| p.label).collect()
    }
}

/// Side-tagged name of an n-gram column.
pub fn tagged_name(side: Side, ngram: &str) -> String {
    let tag = match side {
        Side::Left => 'L',
        Side::Right => 'R',
    };
    format!("{tag}|{ngram}")
}

/// A fitted column layout: selected n-grams followed by phonetic devices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub set: FeatureSet,
    /// Selected side-tagged n-grams in column order.
    pub ngrams: Vec<(Side, String)>,
    pub devices: Vec<Device>,
}

impl FeatureSpace {
    pub fn new(set: FeatureSet, ngrams: Vec<(Side, String)>) -> Self {
        Self {
            set,
            ngrams,
            devices: set.devices(),
        }
    }

    /// Number of columns.
    pub fn dim(&self) -> usize {
        self.ngrams.len() + 2 * self.devices.len()
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.ngrams.iter().map(|(s, g)| tagged_name(*s, g)).collect();
        for side in [Side::Left, Side::Right] {
            for d in &self.devices {
                names.push(format!("{}|{}", if side == Side::Left { 'L' } else { 'R' }, d.short()));
            }
        }
        names
    }

    /// Column lookup for the n-grams of a prepared corpus.
    pub fn bind(&self, names: &[String]) -> Binding {
        let by_name: HashMap<(Side, &str), u32> = self
            .ngrams
            .iter()
            .enumerate()
            .map(|(col, (s, g))| ((*s, g.as_str()), col as u32))
            .collect();
        let columns = names
            .iter()
            .map(|g| [Side::Left, Side::Right].map(|s| by_name.get(&(s, g.as_str())).copied()))
            .collect();
        Binding { columns }
    }

    fn phonetic_entries(&self, left: &[f64; 4], right: &[f64; 4], out: &mut Vec<(u32, f64)>) {
        let base = self.ngrams.len();
        let per_side = self.devices.len();
        for (s, profile) in [left, right].into_iter().enumerate() {
            for (j, d) in self.devices.iter().enumerate() {
                out.push(((base + s * per_side + j) as u32, profile[d.index()]));
            }
        }
    }

    /// Vector for a prepared pair under `binding`.
    pub fn vectorize(&self, pair: &PreparedPair, binding: &Binding) -> SparseVec {
        let mut entries = Vec::new();
        for (s, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            for &id in &pair.side(side).ngrams {
                if let Some(col) = binding.columns.get(id as usize).and_then(|c| c[s]) {
                    entries.push((col, 1.0));
                }
            }
        }
        self.phonetic_entries(&pair.left.profile, &pair.right.profile, &mut entries);
        SparseVec::from_entries(entries)
    }

    /// Vector for a raw sentence pair.
    pub fn vectorize_text(&self, pair: &SentencePair, dict: &PronDict, pipeline: &TextPipeline) -> PairFeatureVector {
        let index: HashMap<(Side, &str), u32> = self
            .ngrams
            .iter()
            .enumerate()
            .map(|(col, (s, g))| ((*s, g.as_str()), col as u32))
            .collect();
        let mut entries = Vec::new();
        for side in [Side::Left, Side::Right] {
            for g in pipeline.sentence_ngrams(pair.text(side)) {
                if let Some(&col) = index.get(&(side, g.as_str())) {
                    entries.push((col, 1.0));
                }
            }
        }
        let left = pipeline.profile(&pair.left, dict).scores();
        let right = pipeline.profile(&pair.right, dict).scores();
        self.phonetic_entries(&left, &right, &mut entries);
        PairFeatureVector {
            values: SparseVec::from_entries(entries),
            label: pair.label,
        }
    }
}

/// Interned n-gram id → column for the left and right block.
#[derive(Debug, Clone)]
pub struct Binding {
    columns: Vec<[Option<u32>; 2]>,
}

impl Binding {
    /// Binding from per-id column slots, e.g. a rank prefix.
    pub fn from_columns(columns: Vec<[Option<u32>; 2]>) -> Self {
        Self { columns }
    }
}
