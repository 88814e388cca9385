//! Phoneme-level euphony scoring and the statistics and pairwise classifiers
//! built on top of it.
//!
//! * [`phonodict`] parses a CMU-style ARPABET dictionary.
//! * [`scorer`] turns a sentence into rhyme, alliteration, plosive and
//!   homogeneity scores.
//! * [`corpus`] loads paired persuasive / non-persuasive sentences.
//! * [`stats`] compares score distributions between the two sides.
//! * [`learner`] trains and evaluates pairwise SVM classifiers.

pub mod corpus;
pub mod learner;
pub mod par;
pub mod phonodict;
pub mod scorer;
pub mod stats;

pub use corpus::{PairCorpus, SentencePair, Side, TextMode};
pub use phonodict::{Phoneme, PronDict, Pronunciation};
pub use scorer::{score_sentence, Device, PhoneticProfile};
