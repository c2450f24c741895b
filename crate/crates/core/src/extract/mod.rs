//! Per-document keyword ("complex tag") extraction.
//!
//! Three interchangeable backends sit behind [`KeywordExtractor`]: local
//! tf-idf scoring, a local co-occurrence-graph ranker, and an HTTP client for
//! a Watson-style keyword service. Local backends normalize phrase scores by
//! the document maximum so the best phrase always has confidence 1.0.

mod cache;
mod graph;
mod remote;
mod tfidf;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, StopwordList};
use crate::error::{Error, Result};

pub(crate) use cache::UNPROCESSABLE;
pub use cache::{extract_corpus, CacheRecord, ComplexTagCache};
pub use graph::{CooccurrenceGraph, GraphExtractor, DAMPING, MAX_ITERATIONS, TOLERANCE, WINDOW};
pub use remote::{KeywordsRequest, KeywordsResponse, RemoteExtractor};
pub use tfidf::{tfidf_weight, TermStats, TfidfExtractor};

/// An extracted keyword or key phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexTag {
    pub phrase: String,
    pub confidence: f64,
}

impl ComplexTag {
    pub fn new(phrase: impl Into<String>, confidence: f64) -> Self {
        ComplexTag {
            phrase: phrase.into(),
            confidence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractorKind {
    #[default]
    Tfidf,
    Graph,
    Remote,
}

impl FromStr for ExtractorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tfidf" => Ok(ExtractorKind::Tfidf),
            "graph" => Ok(ExtractorKind::Graph),
            "remote" => Ok(ExtractorKind::Remote),
            other => Err(Error::Config(format!(
                "unknown extractor {other:?} (expected tfidf, graph or remote)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    pub kind: ExtractorKind,
    /// Tags are kept only when their confidence is strictly greater.
    pub confidence_threshold: f64,
    pub max_phrase_len: usize,
    pub max_tags_per_doc: usize,
    pub endpoint: Option<String>,
    /// Sent as `Authorization: Bearer <token>` by the remote client.
    pub api_token: Option<String>,
    /// Maximum in-flight remote requests.
    pub concurrency: usize,
    pub timeout_secs: u64,
    pub retry_backoff_ms: u64,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        ExtractorConfig {
            kind: ExtractorKind::Tfidf,
            confidence_threshold: 0.5,
            max_phrase_len: 4,
            max_tags_per_doc: 50,
            endpoint: None,
            api_token: None,
            concurrency: 8,
            timeout_secs: 30,
            retry_backoff_ms: 200,
        }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return Err(Error::Config(format!(
                "confidence threshold {} outside [0, 1]",
                self.confidence_threshold
            )));
        }
        if self.max_phrase_len < 1 {
            return Err(Error::Config("max_phrase_len must be at least 1".into()));
        }
        if self.concurrency < 1 {
            return Err(Error::Config("concurrency must be at least 1".into()));
        }
        if self.kind == ExtractorKind::Remote && self.endpoint.is_none() {
            return Err(Error::Config(
                "remote extractor requires an endpoint".into(),
            ));
        }
        Ok(())
    }
}

pub trait KeywordExtractor: Sync {
    fn extract(&self, doc: &Document) -> Result<Vec<ComplexTag>>;

    /// Upper bound on concurrent calls, if the backend needs one.
    fn max_in_flight(&self) -> Option<usize> {
        None
    }
}

/// Extractor chosen at runtime from an [`ExtractorConfig`].
pub enum Extractor {
    Tfidf(TfidfExtractor),
    Graph(GraphExtractor),
    Remote(RemoteExtractor),
}

impl Extractor {
    /// `corpus` supplies document frequencies for the tf-idf backend and is
    /// ignored by the others.
    pub fn from_config(
        config: &ExtractorConfig,
        corpus: &[Document],
        stopwords: &StopwordList,
    ) -> Result<Self> {
        config.validate()?;
        Ok(match config.kind {
            ExtractorKind::Tfidf => Extractor::Tfidf(TfidfExtractor::new(
                TermStats::build(corpus, stopwords),
                stopwords.clone(),
                config.clone(),
            )),
            ExtractorKind::Graph => {
                Extractor::Graph(GraphExtractor::new(stopwords.clone(), config.clone()))
            }
            ExtractorKind::Remote => {
                Extractor::Remote(RemoteExtractor::new(config.clone(), stopwords.clone())?)
            }
        })
    }
}

impl KeywordExtractor for Extractor {
    fn extract(&self, doc: &Document) -> Result<Vec<ComplexTag>> {
        match self {
            Extractor::Tfidf(e) => e.extract(doc),
            Extractor::Graph(e) => e.extract(doc),
            Extractor::Remote(e) => e.extract(doc),
        }
    }

    fn max_in_flight(&self) -> Option<usize> {
        match self {
            Extractor::Remote(e) => e.max_in_flight(),
            _ => None,
        }
    }
}

/// Collapses immediate repeats inside each run ("alpha alpha" -> "alpha"),
/// then splits it into consecutive chunks of at most `max_len` tokens.
pub(crate) fn candidate_phrases(runs: &[Vec<String>], max_len: usize) -> Vec<Vec<String>> {
    runs.iter()
        .flat_map(|run| {
            let mut collapsed = run.clone();
            collapsed.dedup();
            collapsed
                .chunks(max_len.max(1))
                .map(<[String]>::to_vec)
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Descending confidence, then ascending phrase.
pub(crate) fn tag_order(a: &ComplexTag, b: &ComplexTag) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| a.phrase.cmp(&b.phrase))
}

/// Threshold, order and cap tags that already carry confidences.
pub(crate) fn select(mut tags: Vec<ComplexTag>, config: &ExtractorConfig) -> Vec<ComplexTag> {
    tags.retain(|t| t.confidence > config.confidence_threshold);
    tags.sort_by(tag_order);
    tags.truncate(config.max_tags_per_doc);
    tags
}

/// Normalize raw phrase scores by the document maximum, then [`select`].
/// Repeated phrases keep a single entry.
pub(crate) fn normalize_and_select(
    scored: Vec<(String, f64)>,
    config: &ExtractorConfig,
) -> Vec<ComplexTag> {
    let mut unique: HashMap<String, f64> = HashMap::new();
    for (phrase, score) in scored {
        let entry = unique.entry(phrase).or_insert(score);
        if score > *entry {
            *entry = score;
        }
    }
    let max = unique.values().copied().fold(0.0_f64, f64::max);
    if !(max > 0.0 && max.is_finite()) {
        return Vec::new();
    }
    let tags = unique
        .into_iter()
        .map(|(phrase, score)| ComplexTag {
            phrase,
            confidence: (score / max).clamp(0.0, 1.0),
        })
        .collect();
    select(tags, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_threshold_excludes_half() {
        let config = ExtractorConfig::default();
        let tags = vec![
            ComplexTag::new("a", 1.0),
            ComplexTag::new("b", 0.8),
            ComplexTag::new("c", 0.5),
            ComplexTag::new("d", 0.3),
        ];
        let kept: Vec<_> = select(tags, &config)
            .into_iter()
            .map(|t| t.phrase)
            .collect();
        assert_eq!(kept, ["a", "b"]);
    }

    #[test]
    fn ties_break_lexicographically_and_cap_applies() {
        let config = ExtractorConfig {
            max_tags_per_doc: 2,
            ..Default::default()
        };
        let tags = vec![
            ComplexTag::new("zeta", 0.9),
            ComplexTag::new("alpha", 0.9),
            ComplexTag::new("top", 1.0),
        ];
        let kept: Vec<_> = select(tags, &config)
            .into_iter()
            .map(|t| t.phrase)
            .collect();
        assert_eq!(kept, ["top", "alpha"]);
    }

    #[test]
    fn normalization_puts_top_at_one() {
        let config = ExtractorConfig::default();
        let tags = normalize_and_select(
            vec![("x".into(), 4.0), ("y".into(), 3.0), ("z".into(), 1.0)],
            &config,
        );
        assert_eq!(tags[0], ComplexTag::new("x", 1.0));
        assert_eq!(tags[1], ComplexTag::new("y", 0.75));
        assert_eq!(tags.len(), 2);
    }

    #[test]
    fn all_zero_scores_yield_nothing() {
        let config = ExtractorConfig::default();
        assert!(normalize_and_select(vec![("x".into(), 0.0)], &config).is_empty());
    }

    #[test]
    fn config_validation() {
        let mut c = ExtractorConfig::default();
        assert!(c.validate().is_ok());
        c.confidence_threshold = 1.5;
        assert!(c.validate().is_err());
        c.confidence_threshold = 0.5;
        c.max_phrase_len = 0;
        assert!(c.validate().is_err());
        c.max_phrase_len = 4;
        c.kind = ExtractorKind::Remote;
        assert!(c.validate().is_err());
        assert_eq!(
            "graph".parse::<ExtractorKind>().unwrap(),
            ExtractorKind::Graph
        );
        assert!("watson".parse::<ExtractorKind>().is_err());
    }

    #[test]
    fn chunking_respects_max_len() {
        let run: Vec<String> = ["a", "b", "c", "d", "e"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let runs = vec![run];
        let chunks = candidate_phrases(&runs, 2);
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[2], ["e".to_string()]);
        let repeated = vec![vec!["x".to_string(), "x".to_string(), "y".to_string()]];
        assert_eq!(
            candidate_phrases(&repeated, 4),
            vec![vec!["x".to_string(), "y".to_string()]]
        );
    }
}
