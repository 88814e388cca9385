//! Rule-based normalization and tokenization.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub const URL_TAG: &str = "_URL_";
pub const MENTION_TAG: &str = "_MENTION_";

const DEFAULT_STOPWORDS: &str = include_str!("../../assets/stopwords.txt");

/// Text source conventions. Twitter text gets URL and mention tagging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextMode {
    #[default]
    Generic,
    Twitter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedSentence {
    pub raw: String,
    pub tokens: Vec<String>,
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S+").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").unwrap())
}

fn tag_of(token: &str) -> Option<&'static str> {
    if token.eq_ignore_ascii_case(URL_TAG) {
        Some(URL_TAG)
    } else if token.eq_ignore_ascii_case(MENTION_TAG) {
        Some(MENTION_TAG)
    } else {
        None
    }
}

fn tokenize(text: &str, mode: TextMode, keep_apostrophes: bool) -> Vec<String> {
    let lowered = text.to_lowercase();
    let tagged = match mode {
        TextMode::Generic => lowered,
        TextMode::Twitter => {
            let s = url_re().replace_all(&lowered, format!(" {URL_TAG} "));
            mention_re().replace_all(&s, format!(" {MENTION_TAG} ")).into_owned()
        }
    };

    let mut tokens = Vec::new();
    for chunk in tagged.split_whitespace() {
        if mode == TextMode::Twitter {
            if let Some(tag) = tag_of(chunk) {
                tokens.push(tag.to_string());
                continue;
            }
        }
        // Non-ASCII is deleted, ASCII punctuation separates words, digits vanish.
        let mut current = String::new();
        for c in chunk.chars() {
            if !c.is_ascii() || c.is_ascii_digit() {
                continue;
            }
            if c.is_ascii_alphabetic() || (keep_apostrophes && c == '\'') {
                current.push(c);
            } else {
                push_token(&mut tokens, &mut current, keep_apostrophes);
            }
        }
        push_token(&mut tokens, &mut current, keep_apostrophes);
    }
    tokens
}

fn push_token(tokens: &mut Vec<String>, current: &mut String, keep_apostrophes: bool) {
    if keep_apostrophes {
        let trimmed = current.trim_matches('\'');
        if trimmed.bytes().any(|b| b.is_ascii_alphabetic()) {
            tokens.push(trimmed.to_string());
        }
    } else if !current.is_empty() {
        tokens.push(current.clone());
    }
    current.clear();
}

/// Normalization used for n-gram features: lowercase, optional URL/mention
/// tagging, then non-ASCII, punctuation and digits are dropped.
pub fn normalize(text: &str, mode: TextMode) -> TokenizedSentence {
    TokenizedSentence {
        raw: text.to_string(),
        tokens: tokenize(text, mode, false),
    }
}

/// Lighter normalization for dictionary lookup. Word-internal apostrophes
/// survive so that contractions like `don't` resolve.
pub fn scoring_tokens(text: &str, mode: TextMode) -> Vec<String> {
    tokenize(text, mode, true)
}

/// A set of function words removed from unigram features.
#[derive(Debug, Clone)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// Parses one word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn open(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn empty() -> Self {
        Self(HashSet::new())
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self(words.into_iter().map(|w| w.as_ref().to_lowercase()).collect())
    }

    /// The words in sorted order.
    pub fn words(&self) -> Vec<&str> {
        let mut w: Vec<&str> = self.0.iter().map(String::as_str).collect();
        w.sort_unstable();
        w
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn filter<'a, S: AsRef<str>>(&self, tokens: &'a [S]) -> Vec<&'a str> {
        tokens.iter().map(AsRef::as_ref).filter(|t| !self.contains(t)).collect()
    }
}

impl Default for Stopwords {
    /// The bundled English list.
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}
