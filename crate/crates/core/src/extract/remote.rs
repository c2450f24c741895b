use std::collections::HashMap;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use ureq::Agent;

use crate::corpus::{raw_words, Document, StopwordList};
use crate::error::{Error, Result};

use super::{select, ComplexTag, ExtractorConfig, KeywordExtractor};

const ATTEMPTS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordsRequest {
    pub text: String,
    pub features: Features,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Features {
    pub keywords: KeywordsFeature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordsFeature {
    pub limit: usize,
}

impl KeywordsRequest {
    pub fn new(text: impl Into<String>, limit: usize) -> Self {
        KeywordsRequest {
            text: text.into(),
            features: Features {
                keywords: KeywordsFeature { limit },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordsResponse {
    pub keywords: Vec<Keyword>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub text: String,
    pub relevance: f64,
}

enum Failure {
    Transient(String),
    Permanent(String),
}

/// Client for a Watson-style keyword service.
pub struct RemoteExtractor {
    agent: Agent,
    endpoint: String,
    stopwords: StopwordList,
    config: ExtractorConfig,
}

impl RemoteExtractor {
    pub fn new(config: ExtractorConfig, stopwords: StopwordList) -> Result<Self> {
        let endpoint = config
            .endpoint
            .clone()
            .ok_or_else(|| Error::Config("remote extractor requires an endpoint".into()))?;
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteExtractor {
            agent,
            endpoint,
            stopwords,
            config,
        })
    }

    fn attempt(&self, request: &KeywordsRequest) -> std::result::Result<KeywordsResponse, Failure> {
        let mut call = self.agent.post(&self.endpoint);
        if let Some(token) = &self.config.api_token {
            call = call.header("Authorization", &format!("Bearer {token}"));
        }
        let mut response = call
            .send_json(request)
            .map_err(|e| Failure::Transient(e.to_string()))?;
        let status = response.status().as_u16();
        if status == 429 || status >= 500 {
            return Err(Failure::Transient(format!("HTTP {status}")));
        }
        if status != 200 {
            return Err(Failure::Permanent(format!("HTTP {status}")));
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| Failure::Transient(e.to_string()))?;
        let parsed: KeywordsResponse = serde_json::from_str(&body)
            .map_err(|e| Failure::Permanent(format!("malformed response: {e}")))?;
        if let Some(bad) = parsed
            .keywords
            .iter()
            .find(|k| !(0.0..=1.0).contains(&k.relevance))
        {
            return Err(Failure::Permanent(format!(
                "malformed response: relevance {} outside [0, 1]",
                bad.relevance
            )));
        }
        Ok(parsed)
    }

    /// Lowercases the keyword, trims stopwords and numerals from both ends
    /// and truncates it to `max_phrase_len` tokens.
    fn normalize_phrase(&self, text: &str) -> Option<String> {
        let words = raw_words(text);
        let keep = |w: &String| {
            !self.stopwords.contains(w) && !w.chars().all(|c| c.is_numeric() || c == '-')
        };
        let start = words.iter().position(keep)?;
        let end = words.iter().rposition(keep)?;
        let mut phrase = words[start..=end].to_vec();
        phrase.truncate(self.config.max_phrase_len);
        while phrase.last().is_some_and(|w| !keep(w)) {
            phrase.pop();
        }
        Some(phrase.join(" "))
    }

    fn to_tags(&self, response: KeywordsResponse) -> Vec<ComplexTag> {
        let mut best: HashMap<String, f64> = HashMap::new();
        for kw in response.keywords {
            if let Some(phrase) = self.normalize_phrase(&kw.text) {
                let entry = best.entry(phrase).or_insert(kw.relevance);
                *entry = entry.max(kw.relevance);
            }
        }
        select(
            best.into_iter()
                .map(|(phrase, confidence)| ComplexTag { phrase, confidence })
                .collect(),
            &self.config,
        )
    }
}

impl KeywordExtractor for RemoteExtractor {
    fn extract(&self, doc: &Document) -> Result<Vec<ComplexTag>> {
        let request = KeywordsRequest::new(doc.text(), self.config.max_tags_per_doc);
        let mut last = String::new();
        for attempt in 0..ATTEMPTS {
            if attempt > 0 {
                let backoff = self.config.retry_backoff_ms << (attempt - 1);
                thread::sleep(Duration::from_millis(backoff));
            }
            match self.attempt(&request) {
                Ok(response) => return Ok(self.to_tags(response)),
                Err(Failure::Permanent(msg)) => return Err(Error::Extraction(msg)),
                Err(Failure::Transient(msg)) => {
                    log::debug!("{}: attempt {} failed: {msg}", doc.id, attempt + 1);
                    last = msg;
                }
            }
        }
        Err(Error::Extraction(format!(
            "gave up after {ATTEMPTS} attempts: {last}"
        )))
    }

    fn max_in_flight(&self) -> Option<usize> {
        Some(self.config.concurrency)
    }
}
