//! Pair corpora: ingestion, symmetrization, normalization and stopwords.

mod pairs;
pub mod synthetic;
mod text;

pub use pairs::{
    load_pairs, parse_pairs, CorpusError, LoadedCorpus, PairCorpus, PairFormat, RowError, SentencePair, Side,
    SWAP_SUFFIX,
};
pub use text::{normalize, scoring_tokens, Stopwords, TextMode, TokenizedSentence, MENTION_TAG, URL_TAG};
