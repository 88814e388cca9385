//! ARPABET pronouncing dictionary in the CMU dict 0.7a layout.
//!
//! Each non-comment line holds a headword followed by its phonemes, e.g.
//!
//! ```text
//! ;;; comment
//! READ  R EH1 D
//! READ(1)  R IY1 D
//! ```
//!
//! Stress digits are dropped while parsing, so every [`Phoneme`] is one of the
//! 39 stress-free ARPABET symbols. Variant headwords (`READ(1)`) are folded into
//! the base entry in file order; lookups always use the first pronunciation.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Broad articulatory class of a phoneme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhonemeClass {
    Vowel,
    Plosive,
    OtherConsonant,
}

macro_rules! phonemes {
    ($($name:ident => $class:ident),+ $(,)?) => {
        /// A stress-free ARPABET phoneme.
        #[allow(clippy::upper_case_acronyms)]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Phoneme {
            $($name),+
        }

        impl Phoneme {
            /// Every symbol of the inventory, in alphabetical order.
            pub const ALL: &'static [Phoneme] = &[$(Phoneme::$name),+];

            pub fn symbol(self) -> &'static str {
                match self {
                    $(Phoneme::$name => stringify!($name)),+
                }
            }

            pub fn class(self) -> PhonemeClass {
                match self {
                    $(Phoneme::$name => PhonemeClass::$class),+
                }
            }
        }

        impl FromStr for Phoneme {
            type Err = UnknownPhoneme;

            /// Parses a symbol, accepting (and discarding) a trailing stress digit.
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let bare = s.strip_suffix(['0', '1', '2']).unwrap_or(s);
                match bare {
                    $(stringify!($name) => Ok(Phoneme::$name),)+
                    _ => Err(UnknownPhoneme(s.to_string())),
                }
            }
        }
    };
}

phonemes! {
    AA => Vowel, AE => Vowel, AH => Vowel, AO => Vowel, AW => Vowel, AY => Vowel,
    B => Plosive, CH => OtherConsonant, D => Plosive, DH => OtherConsonant,
    EH => Vowel, ER => Vowel, EY => Vowel, F => OtherConsonant, G => Plosive,
    HH => OtherConsonant, IH => Vowel, IY => Vowel, JH => OtherConsonant,
    K => Plosive, L => OtherConsonant, M => OtherConsonant, N => OtherConsonant,
    NG => OtherConsonant, OW => Vowel, OY => Vowel, P => Plosive,
    R => OtherConsonant, S => OtherConsonant, SH => OtherConsonant, T => Plosive,
    TH => OtherConsonant, UH => Vowel, UW => Vowel, V => OtherConsonant,
    W => OtherConsonant, Y => OtherConsonant, Z => OtherConsonant, ZH => OtherConsonant,
}

impl Phoneme {
    pub fn is_plosive(self) -> bool {
        self.class() == PhonemeClass::Plosive
    }

    pub fn is_vowel(self) -> bool {
        self.class() == PhonemeClass::Vowel
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown ARPABET symbol `{0}`")]
pub struct UnknownPhoneme(pub String);

/// The phoneme sequence of one word. Never empty when it comes from a dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pronunciation(Vec<Phoneme>);

impl Pronunciation {
    /// Returns `None` for an empty sequence.
    pub fn new(phonemes: Vec<Phoneme>) -> Option<Self> {
        if phonemes.is_empty() {
            None
        } else {
            Some(Self(phonemes))
        }
    }

    pub fn phonemes(&self) -> &[Phoneme] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Pronunciation {
    type Err = UnknownPhoneme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let phonemes = s.split_whitespace().map(str::parse).collect::<Result<Vec<_>, _>>()?;
        Pronunciation::new(phonemes).ok_or_else(|| UnknownPhoneme(String::new()))
    }
}

impl fmt::Display for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(p.symbol())?;
        }
        Ok(())
    }
}

/// One rejected dictionary line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("line {line}: unknown phoneme symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("line {line}: headword without phonemes")]
    MissingPhonemes { line: usize },
    #[error("line {line}: malformed variant headword `{headword}`")]
    BadVariant { line: usize, headword: String },
}

#[derive(Debug, Error)]
pub enum DictError {
    #[error("failed to read dictionary {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} malformed dictionary line(s); first: {}", .0.len(), .0[0])]
    Malformed(Vec<LineError>),
}

/// Non-fatal parse findings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DictWarning {
    /// A base headword appeared again; the later line was dropped.
    DuplicateHeadword { line: usize, headword: String },
}

impl fmt::Display for DictWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DictWarning::DuplicateHeadword { line, headword } => {
                write!(f, "line {line}: duplicate headword `{headword}` ignored")
            }
        }
    }
}

/// Immutable word → pronunciations map.
#[derive(Debug, Clone, Default)]
pub struct PronDict {
    entries: HashMap<String, Vec<Pronunciation>>,
    source_version: String,
}

impl PronDict {
    /// Parses dictionary text. Warnings are logged and dropped; use
    /// [`PronDict::parse_with_warnings`] to inspect them.
    pub fn parse(text: &str) -> Result<Self, DictError> {
        let (dict, warnings) = Self::parse_with_warnings(text)?;
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(dict)
    }

    pub fn parse_with_warnings(text: &str) -> Result<(Self, Vec<DictWarning>), DictError> {
        let mut entries: HashMap<String, Vec<Pronunciation>> = HashMap::new();
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        let mut version = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix(";;;") {
                if version.is_none() && comment.to_ascii_lowercase().contains("version") {
                    version = Some(comment.trim().to_string());
                }
                continue;
            }

            let mut fields = line.split_whitespace();
            let headword = fields.next().unwrap_or_default();
            let (base, is_variant) = match split_variant(headword) {
                Ok(parts) => parts,
                Err(()) => {
                    errors.push(LineError::BadVariant {
                        line: line_no,
                        headword: headword.to_string(),
                    });
                    continue;
                }
            };

            let mut phonemes = Vec::new();
            let mut bad_symbol = None;
            for sym in fields {
                match sym.parse::<Phoneme>() {
                    Ok(p) => phonemes.push(p),
                    Err(_) => {
                        bad_symbol = Some(sym.to_string());
                        break;
                    }
                }
            }
            if let Some(symbol) = bad_symbol {
                errors.push(LineError::UnknownSymbol { line: line_no, symbol });
                continue;
            }
            let Some(pron) = Pronunciation::new(phonemes) else {
                errors.push(LineError::MissingPhonemes { line: line_no });
                continue;
            };

            let key = base.to_uppercase();
            match entries.get_mut(&key) {
                Some(_) if !is_variant => warnings.push(DictWarning::DuplicateHeadword {
                    line: line_no,
                    headword: key,
                }),
                Some(variants) => variants.push(pron),
                None => {
                    entries.insert(key, vec![pron]);
                }
            }
        }

        if !errors.is_empty() {
            return Err(DictError::Malformed(errors));
        }
        let dict = PronDict {
            entries,
            source_version: version.unwrap_or_else(|| "unversioned".to_string()),
        };
        Ok((dict, warnings))
    }

    /// Reads a dictionary file. Non-UTF-8 input is decoded as Latin-1.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, DictError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| DictError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let text = match String::from_utf8(bytes) {
            Ok(s) => s,
            Err(e) => e.into_bytes().iter().map(|&b| b as char).collect(),
        };
        let mut dict = Self::parse(&text)?;
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        dict.source_version = format!("{file} ({})", dict.source_version);
        Ok(dict)
    }

    /// First (base) pronunciation of a word, case-insensitively.
    pub fn lookup(&self, word: &str) -> Option<&Pronunciation> {
        self.variants(word).and_then(|v| v.first())
    }

    /// All pronunciations of a word in file order.
    pub fn variants(&self, word: &str) -> Option<&[Pronunciation]> {
        let key = if word.bytes().any(|b| b.is_ascii_lowercase()) || !word.is_ascii() {
            std::borrow::Cow::Owned(word.to_uppercase())
        } else {
            std::borrow::Cow::Borrowed(word)
        };
        self.entries.get(key.as_ref()).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup(word).is_some()
    }

    /// Number of distinct headwords.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of (headword, pronunciation) pairs.
    pub fn variant_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Headwords in sorted order.
    pub fn headwords(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    pub fn source_version(&self) -> &str {
        &self.source_version
    }

    pub fn with_source_version(mut self, version: impl Into<String>) -> Self {
        self.source_version = version.into();
        self
    }
}

/// Splits `WORD(2)` into (`WORD`, true); a plain headword yields (`WORD`, false).
fn split_variant(headword: &str) -> Result<(&str, bool), ()> {
    let Some(open) = headword.rfind('(') else {
        return Ok((headword, false));
    };
    let (base, rest) = headword.split_at(open);
    let digits = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or(())?;
    if base.is_empty() || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(());
    }
    Ok((base, true))
}
