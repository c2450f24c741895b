use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

use super::{tag_order, ComplexTag, KeywordExtractor};

pub(crate) const UNPROCESSABLE: &str = "unprocessable: title, summary and content are empty";

/// One line of the complex-tag cache.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub id: String,
    pub tags: Vec<ComplexTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Extraction results in document order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComplexTagCache {
    pub records: Vec<CacheRecord>,
}

impl ComplexTagCache {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &CacheRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }

    pub fn by_id(&self) -> HashMap<&str, &CacheRecord> {
        self.records.iter().map(|r| (r.id.as_str(), r)).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("cache record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))
    }

    /// Tags of each record are re-sorted into canonical order on load.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut records = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut record: CacheRecord = serde_json::from_str(&line)
                .map_err(|e| Error::parse(path, idx + 1, e.to_string()))?;
            if let Some(tag) = record
                .tags
                .iter()
                .find(|t| t.phrase.is_empty() || !(0.0..=1.0).contains(&t.confidence))
            {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("invalid tag {:?} ({})", tag.phrase, tag.confidence),
                ));
            }
            record.tags.sort_by(tag_order);
            records.push(record);
        }
        Ok(ComplexTagCache { records })
    }
}

/// Run `extractor` over every document. Per-document failures become error
/// records; the output order always matches `docs`.
pub fn extract_corpus(docs: &[Document], extractor: &dyn KeywordExtractor) -> ComplexTagCache {
    let run_one = |doc: &Document| -> CacheRecord {
        if !doc.is_processable() {
            return CacheRecord {
                id: doc.id.clone(),
                tags: Vec::new(),
                error: Some(UNPROCESSABLE.to_string()),
            };
        }
        match extractor.extract(doc) {
            Ok(tags) => CacheRecord {
                id: doc.id.clone(),
                tags,
                error: None,
            },
            Err(e) => {
                log::warn!("extraction failed for {}: {e}", doc.id);
                CacheRecord {
                    id: doc.id.clone(),
                    tags: Vec::new(),
                    error: Some(e.to_string()),
                }
            }
        }
    };
    let records = match extractor.max_in_flight() {
        Some(limit) => rayon::ThreadPoolBuilder::new()
            .num_threads(limit.max(1))
            .build()
            .map(|pool| pool.install(|| docs.par_iter().map(run_one).collect()))
            .unwrap_or_else(|_| docs.iter().map(run_one).collect()),
        None => docs.par_iter().map(run_one).collect(),
    };
    ComplexTagCache { records }
}
