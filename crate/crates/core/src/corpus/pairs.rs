//! Paired persuasive / non-persuasive sentence corpora and their file formats.
//!
//! TSV files carry a `pair_id\tleft\tright\tlabel` header; JSONL files hold one
//! object per line with the same keys. `label` names the persuasive side.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Suffix appended to the id of a swapped twin created by [`PairCorpus::symmetrize`].
pub const SWAP_SUFFIX: &str = "~swapped";

const TSV_HEADER: [&str; 4] = ["pair_id", "left", "right", "label"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(format!("invalid label `{other}`")),
        }
    }
}

/// Two sentences and the side holding the persuasive one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub pair_id: String,
    pub left: String,
    pub right: String,
    pub label: Side,
}

impl SentencePair {
    pub fn text(&self, side: Side) -> &str {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn persuasive(&self) -> &str {
        self.text(self.label)
    }

    pub fn non_persuasive(&self) -> &str {
        self.text(self.label.flip())
    }

    pub fn swapped(&self) -> SentencePair {
        SentencePair {
            pair_id: format!("{}{SWAP_SUFFIX}", self.pair_id),
            left: self.right.clone(),
            right: self.left.clone(),
            label: self.label.flip(),
        }
    }

    /// Id shared by a pair and its swapped twin.
    pub fn group_id(&self) -> &str {
        self.pair_id.strip_suffix(SWAP_SUFFIX).unwrap_or(&self.pair_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCorpus {
    pub name: String,
    pub pairs: Vec<SentencePair>,
    pub symmetrized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairFormat {
    Tsv,
    Jsonl,
}

impl PairFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "tsv" | "tab" => Some(PairFormat::Tsv),
            "jsonl" | "ndjson" => Some(PairFormat::Jsonl),
            _ => None,
        }
    }
}

impl FromStr for PairFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(PairFormat::Tsv),
            "jsonl" => Ok(PairFormat::Jsonl),
            other => Err(format!("unknown pair format `{other}`")),
        }
    }
}

/// A rejected input row; `row` is the 1-based line number in the file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("row {row}: {reason}")]
pub struct RowError {
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing or wrong TSV header (expected pair_id, left, right, label)")]
    BadHeader { path: String },
    #[error("corpus `{0}` is already symmetrized")]
    AlreadySymmetrized(String),
    #[error("field of pair `{0}` contains a tab or newline")]
    UnwritableField(String),
}

/// The outcome of [`load_pairs`]: accepted pairs plus per-row rejections.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub corpus: PairCorpus,
    pub rejected: Vec<RowError>,
}

fn check_pair(row: usize, pair_id: &str, left: &str, right: &str, label: &str) -> Result<SentencePair, RowError> {
    let err = |reason: String| RowError { row, reason };
    if pair_id.trim().is_empty() {
        return Err(err("empty pair_id".into()));
    }
    if left.trim().is_empty() || right.trim().is_empty() {
        return Err(err("empty sentence".into()));
    }
    let label = label.parse::<Side>().map_err(err)?;
    Ok(SentencePair {
        pair_id: pair_id.to_string(),
        left: left.to_string(),
        right: right.to_string(),
        label,
    })
}

#[derive(Deserialize)]
struct JsonRow {
    pair_id: serde_json::Value,
    left: String,
    right: String,
    label: String,
}

/// Parses pair text in the given format. `name` becomes the corpus tag.
pub fn parse_pairs(name: &str, text: &str, format: PairFormat) -> Result<LoadedCorpus, CorpusError> {
    let mut pairs = Vec::new();
    let mut rejected = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    if format == PairFormat::Tsv {
        let header_ok = lines
            .next()
            .map(|(_, h)| h.split('\t').map(str::trim).eq(TSV_HEADER))
            .unwrap_or(false);
        if !header_ok {
            return Err(CorpusError::BadHeader { path: name.to_string() });
        }
    }

    for (row, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match format {
            PairFormat::Tsv => {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 4 {
                    Err(RowError {
                        row,
                        reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
                    })
                } else {
                    check_pair(row, fields[0], fields[1], fields[2], fields[3])
                }
            }
            PairFormat::Jsonl => match serde_json::from_str::<JsonRow>(line) {
                Ok(r) => {
                    let id = match r.pair_id {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    };
                    check_pair(row, &id, &r.left, &r.right, &r.label)
                }
                Err(e) => Err(RowError {
                    row,
                    reason: e.to_string(),
                }),
            },
        };
        match parsed {
            Ok(pair) => pairs.push(pair),
            Err(e) => rejected.push(e),
        }
    }

    Ok(LoadedCorpus {
        corpus: PairCorpus {
            name: name.to_string(),
            pairs,
            symmetrized: false,
        },
        rejected,
    })
}

/// Loads an unsymmetrized corpus named after the file stem.
pub fn load_pairs(path: impl AsRef<Path>, format: PairFormat) -> Result<LoadedCorpus, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    parse_pairs(&name, &text, format).map_err(|e| match e {
        CorpusError::BadHeader { .. } => CorpusError::BadHeader {
            path: path.display().to_string(),
        },
        other => other,
    })
}

impl PairCorpus {
    pub fn new(name: impl Into<String>, pairs: Vec<SentencePair>) -> Self {
        Self {
            name: name.into(),
            pairs,
            symmetrized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Appends the swapped twin of every pair, giving an exactly balanced corpus.
    pub fn symmetrize(&self) -> Result<PairCorpus, CorpusError> {
        if self.symmetrized {
            return Err(CorpusError::AlreadySymmetrized(self.name.clone()));
        }
        let mut pairs = self.pairs.clone();
        pairs.extend(self.pairs.iter().map(SentencePair::swapped));
        Ok(PairCorpus {
            name: self.name.clone(),
            pairs,
            symmetrized: true,
        })
    }

    /// Number of pairs labelled left and right.
    pub fn label_counts(&self) -> (usize, usize) {
        let left = self.pairs.iter().filter(|p| p.label == Side::Left).count();
        (left, self.pairs.len() - left)
    }

    pub fn to_tsv(&self) -> Result<String, CorpusError> {
        let mut out = TSV_HEADER.join("\t");
        out.push('\n');
        for p in &self.pairs {
            let fields = [p.pair_id.as_str(), &p.left, &p.right];
            if fields.iter().any(|f| f.contains(['\t', '\n', '\r'])) {
                return Err(CorpusError::UnwritableField(p.pair_id.clone()));
            }
            out.push_str(&format!("{}\t{}\t{}\t{}\n", p.pair_id, p.left, p.right, p.label));
        }
        Ok(out)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&serde_json::to_string(p).expect("pairs serialize"));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>, format: PairFormat) -> Result<(), CorpusError> {
        let path = path.as_ref();
        let body = match format {
            PairFormat::Tsv => self.to_tsv()?,
            PairFormat::Jsonl => self.to_jsonl(),
        };
        let io_err = |source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut w = BufWriter::new(fs::File::create(path).map_err(io_err)?);
        w.write_all(body.as_bytes()).map_err(io_err)?;
        w.flush().map_err(io_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(id: &str, l: &str, r: &str, label: Side) -> SentencePair {
        SentencePair {
            pair_id: id.into(),
            left: l.into(),
            right: r.into(),
            label,
        }
    }

    #[test]
    fn loads_two_valid_rows() {
        let text = "pair_id\tleft\tright\tlabel\n1\ta b\tc d\tleft\n2\te\tf\tright\n";
        let loaded = parse_pairs("t", text, PairFormat::Tsv).unwrap();
        assert_eq!(loaded.corpus.len(), 2);
        assert!(loaded.rejected.is_empty());
        assert!(!loaded.corpus.symmetrized);
    }

    #[test]
    fn invalid_rows_are_reported() {
        let text = "pair_id\tleft\tright\tlabel\n1\ta\tb\tup\n2\t\tb\tleft\n3\ta\tb\n4\ta\tb\tRIGHT\n";
        let loaded = parse_pairs("t", text, PairFormat::Tsv).unwrap();
        assert_eq!(loaded.corpus.len(), 1);
        let rows: Vec<usize> = loaded.rejected.iter().map(|e| e.row).collect();
        assert_eq!(rows, [2, 3, 4]);
        assert!(loaded.rejected[0].reason.contains("up"));
    }

    #[test]
    fn missing_header_is_fatal() {
        let err = parse_pairs("t", "1\ta\tb\tleft\n", PairFormat::Tsv).unwrap_err();
        assert!(matches!(err, CorpusError::BadHeader { .. }));
    }

    #[test]
    fn jsonl_rows() {
        let text = concat!(
            "{\"pair_id\": 7, \"left\": \"x\", \"right\": \"y\", \"label\": \"right\"}\n",
            "{\"pair_id\": \"8\", \"left\": \"x\", \"right\": \"y\", \"label\": \"down\"}\n",
            "not json\n",
        );
        let loaded = parse_pairs("j", text, PairFormat::Jsonl).unwrap();
        assert_eq!(loaded.corpus.pairs, vec![pair("7", "x", "y", Side::Right)]);
        assert_eq!(loaded.rejected.len(), 2);
    }

    #[test]
    fn symmetrize_one_pair() {
        let c = PairCorpus::new("c", vec![pair("1", "a", "b", Side::Left)]);
        let s = c.symmetrize().unwrap();
        assert_eq!(
            s.pairs,
            vec![
                pair("1", "a", "b", Side::Left),
                pair("1~swapped", "b", "a", Side::Right)
            ]
        );
        assert_eq!(s.pairs[1].group_id(), "1");
        assert!(s.symmetrized);
        assert!(matches!(s.symmetrize(), Err(CorpusError::AlreadySymmetrized(_))));
    }

    #[test]
    fn symmetrize_empty_and_balance() {
        let empty = PairCorpus::new("e", vec![]).symmetrize().unwrap();
        assert!(empty.is_empty());
        let c = PairCorpus::new(
            "c",
            (0..7)
                .map(|i| {
                    pair(
                        &i.to_string(),
                        "a",
                        "b",
                        if i % 3 == 0 { Side::Left } else { Side::Right },
                    )
                })
                .collect(),
        );
        assert_eq!(c.symmetrize().unwrap().label_counts(), (7, 7));
    }

    #[test]
    fn tsv_rejects_tabs() {
        let c = PairCorpus::new("c", vec![pair("1", "a\tb", "c", Side::Left)]);
        assert!(matches!(c.to_tsv(), Err(CorpusError::UnwritableField(_))));
    }

    #[test]
    fn persuasive_side() {
        let p = pair("1", "a", "b", Side::Right);
        assert_eq!(p.persuasive(), "b");
        assert_eq!(p.non_persuasive(), "a");
    }
}
