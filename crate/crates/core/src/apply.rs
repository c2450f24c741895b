//! Attach simple tags to documents.
//!
//! A document's complex tags are tokenized into unigrams with the corpus
//! rules, and every simple tag equal to one of those unigrams is attached.
//! Matching is exact and set-semantic.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Document, StopwordList};
use crate::error::{Error, Result};
use crate::extract::{ComplexTag, ComplexTagCache, KeywordExtractor};
use crate::tagset::SimpleTagSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagSource {
    Cache,
    Extracted,
}

/// One line of the assignment file. The two counters are diagnostics and are
/// not persisted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagAssignment {
    pub id: String,
    pub tags: BTreeSet<String>,
    pub source: TagSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub complex_tag_count: usize,
    #[serde(skip)]
    pub matched_token_count: usize,
}

impl TagAssignment {
    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    fn failed(id: &str, source: TagSource, error: String) -> Self {
        TagAssignment {
            id: id.to_string(),
            tags: BTreeSet::new(),
            source,
            error: Some(error),
            complex_tag_count: 0,
            matched_token_count: 0,
        }
    }
}

pub struct TagApplier<'a> {
    tagset: &'a SimpleTagSet,
    stopwords: &'a StopwordList,
    confidence_threshold: f64,
}

impl<'a> TagApplier<'a> {
    pub fn new(
        tagset: &'a SimpleTagSet,
        stopwords: &'a StopwordList,
        confidence_threshold: f64,
    ) -> Result<Self> {
        if tagset.is_empty() {
            return Err(Error::Config("tag set is empty".into()));
        }
        Ok(TagApplier {
            tagset,
            stopwords,
            confidence_threshold,
        })
    }

    /// Intersect the unigrams of `complex` with the tag set. Tags at or below
    /// the confidence threshold are ignored.
    pub fn attach(&self, id: &str, complex: &[ComplexTag], source: TagSource) -> TagAssignment {
        let mut tags = BTreeSet::new();
        let mut matched = 0;
        let mut count = 0;
        for tag in complex
            .iter()
            .filter(|t| t.confidence > self.confidence_threshold)
        {
            count += 1;
            for token in tokenize(&tag.phrase, self.stopwords) {
                if self.tagset.contains(&token) {
                    matched += 1;
                    tags.insert(token);
                }
            }
        }
        TagAssignment {
            id: id.to_string(),
            tags,
            source,
            error: None,
            complex_tag_count: count,
            matched_token_count: matched,
        }
    }

    pub fn apply_tags(&self, doc: &Document, extractor: &dyn KeywordExtractor) -> TagAssignment {
        if !doc.is_processable() {
            return TagAssignment::failed(
                &doc.id,
                TagSource::Extracted,
                crate::extract::UNPROCESSABLE.to_string(),
            );
        }
        match extractor.extract(doc) {
            Ok(complex) => self.attach(&doc.id, &complex, TagSource::Extracted),
            Err(e) => {
                log::warn!("tag application failed for {}: {e}", doc.id);
                TagAssignment::failed(&doc.id, TagSource::Extracted, e.to_string())
            }
        }
    }

    /// Cached complex tags are reused when the cache holds an error-free
    /// record for the document; otherwise the extractor runs. Output order
    /// matches `docs`.
    pub fn apply_corpus(
        &self,
        docs: &[Document],
        extractor: &dyn KeywordExtractor,
        cache: Option<&ComplexTagCache>,
    ) -> Vec<TagAssignment> {
        let cached = cache.map(ComplexTagCache::by_id).unwrap_or_default();
        let run_one = |doc: &Document| match cached.get(doc.id.as_str()) {
            Some(record) if record.error.is_none() => {
                self.attach(&doc.id, &record.tags, TagSource::Cache)
            }
            _ => self.apply_tags(doc, extractor),
        };
        match extractor.max_in_flight() {
            Some(limit) => rayon::ThreadPoolBuilder::new()
                .num_threads(limit.max(1))
                .build()
                .map(|pool| pool.install(|| docs.par_iter().map(run_one).collect()))
                .unwrap_or_else(|_| docs.iter().map(run_one).collect()),
            None => docs.par_iter().map(run_one).collect(),
        }
    }
}

pub fn assignments_to_jsonl(assignments: &[TagAssignment]) -> String {
    let mut out = String::new();
    for a in assignments {
        out.push_str(&serde_json::to_string(a).expect("assignment serializes"));
        out.push('\n');
    }
    out
}

pub fn save_assignments(path: impl AsRef<Path>, assignments: &[TagAssignment]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, assignments_to_jsonl(assignments)).map_err(|e| Error::io(path, e))
}

pub fn load_assignments(path: impl AsRef<Path>) -> Result<Vec<TagAssignment>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| Error::parse(path, idx + 1, e.to_string()))?,
        );
    }
    Ok(out)
}
