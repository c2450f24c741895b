//! Document ingestion, text normalization and stopword filtering.
//!
//! A token is a maximal run of Unicode letters or digits, with hyphens kept
//! only when they sit between two such characters (`state-of-the-art`).
//! Text is lowercased before segmentation. Tokens made only of digits (and
//! hyphens) are dropped, as are stopwords. No stemming is applied anywhere.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// One unit of ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language_hint: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, content: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            title: String::new(),
            summary: String::new(),
            content: content.into(),
            language_hint: None,
        }
    }

    /// Title, summary and content joined by single spaces.
    pub fn text(&self) -> String {
        [&self.title, &self.summary, &self.content]
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// False when every text field is empty or whitespace.
    pub fn is_processable(&self) -> bool {
        [&self.title, &self.summary, &self.content]
            .iter()
            .any(|s| !s.trim().is_empty())
    }
}

/// Reads a JSON Lines corpus. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn ingest_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if doc.id.is_empty() {
            return Err(Error::EmptyId(lineno));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Exact-match set of normalized (lowercase) words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

impl StopwordList {
    pub fn empty() -> Self {
        StopwordList {
            words: HashSet::new(),
        }
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopwordList {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// One word per line; empty lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn sorted(&self) -> BTreeSet<&str> {
        self.words.iter().map(String::as_str).collect()
    }
}

/// Normalized tokens with stopwords removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

impl IntoIterator for TokenStream {
    type Item = String;
    type IntoIter = std::vec::IntoIter<String>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.into_iter()
    }
}

struct Segment {
    word: String,
    /// Punctuation (anything other than whitespace) separated this word from
    /// the previous one.
    hard_break: bool,
}

fn segments(text: &str) -> Vec<Segment> {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    let mut word = String::new();
    let mut hard_break = false;
    let mut chars = lower.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphanumeric()
            || (c == '-' && !word.is_empty() && chars.peek().is_some_and(|n| n.is_alphanumeric()))
        {
            word.push(c);
        } else {
            if !word.is_empty() {
                out.push(Segment {
                    word: std::mem::take(&mut word),
                    hard_break,
                });
                hard_break = false;
            }
            if !c.is_whitespace() {
                hard_break = true;
            }
        }
    }
    if !word.is_empty() {
        out.push(Segment { word, hard_break });
    }
    out
}

fn is_numeric_token(word: &str) -> bool {
    word.chars().all(|c| c.is_numeric() || c == '-')
}

/// Splits `text` into normalized tokens, dropping numerals and stopwords.
pub fn tokenize(text: &str, stopwords: &StopwordList) -> TokenStream {
    TokenStream {
        tokens: segments(text)
            .into_iter()
            .map(|s| s.word)
            .filter(|w| !is_numeric_token(w) && !stopwords.contains(w))
            .collect(),
    }
}

/// Maximal runs of consecutive kept tokens. A run ends at a stopword, a
/// dropped numeral, or any punctuation between two words.
pub fn phrase_runs(text: &str, stopwords: &StopwordList) -> Vec<Vec<String>> {
    let mut runs = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for seg in segments(text) {
        if seg.hard_break && !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
        if is_numeric_token(&seg.word) || stopwords.contains(&seg.word) {
            if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(seg.word);
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

/// Lowercased segmentation with no filtering at all.
pub(crate) fn raw_words(text: &str) -> Vec<String> {
    segments(text).into_iter().map(|s| s.word).collect()
}
