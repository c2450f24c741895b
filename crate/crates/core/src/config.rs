//! Pipeline configuration: one flat JSON object, overridable per field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{ExtractorConfig, ExtractorKind};
use crate::topics::LdaConfig;

/// Which documents feed the extraction stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetSelector {
    Ids(Vec<String>),
    /// File with one document id per line, best first.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub subset: Option<SubsetSelector>,
    /// Keep only the first N ids of the subset.
    pub subset_limit: Option<usize>,
    /// Replaces the bundled English list.
    pub stopwords: Option<PathBuf>,

    pub extractor: ExtractorKind,
    pub confidence_threshold: f64,
    pub max_phrase_len: usize,
    pub max_tags_per_doc: usize,
    pub endpoint: Option<String>,
    pub api_token: Option<String>,
    pub concurrency: usize,
    pub timeout_secs: u64,
    pub retry_backoff_ms: u64,

    pub topics: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: Option<u64>,

    pub top_words: usize,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let ex = ExtractorConfig::default();
        let lda = LdaConfig::new(0);
        PipelineConfig {
            corpus: None,
            subset: None,
            subset_limit: None,
            stopwords: None,
            extractor: ex.kind,
            confidence_threshold: ex.confidence_threshold,
            max_phrase_len: ex.max_phrase_len,
            max_tags_per_doc: ex.max_tags_per_doc,
            endpoint: ex.endpoint,
            api_token: ex.api_token,
            concurrency: ex.concurrency,
            timeout_secs: ex.timeout_secs,
            retry_backoff_ms: ex.retry_backoff_ms,
            topics: lda.topics,
            alpha: lda.alpha,
            beta: lda.beta,
            sweeps: lda.sweeps,
            burn_in: lda.burn_in,
            thinning: lda.thinning,
            seed: None,
            top_words: 30,
            out: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Relative paths in the file are resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: PipelineConfig = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = config.corpus.as_mut() {
            resolve(p);
        }
        if let Some(SubsetSelector::File(p)) = config.subset.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.stopwords.as_mut() {
            resolve(p);
        }
        resolve(&mut config.out);
        Ok(config)
    }

    pub fn extractor_config(&self) -> ExtractorConfig {
        ExtractorConfig {
            kind: self.extractor,
            confidence_threshold: self.confidence_threshold,
            max_phrase_len: self.max_phrase_len,
            max_tags_per_doc: self.max_tags_per_doc,
            endpoint: self.endpoint.clone(),
            api_token: self.api_token.clone(),
            concurrency: self.concurrency,
            timeout_secs: self.timeout_secs,
            retry_backoff_ms: self.retry_backoff_ms,
        }
    }

    pub fn lda_config(&self) -> Result<LdaConfig> {
        let seed = self
            .seed
            .ok_or_else(|| Error::Config("an RNG seed is required for the model stage".into()))?;
        let config = LdaConfig {
            topics: self.topics,
            alpha: self.alpha,
            beta: self.beta,
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            thinning: self.thinning,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.extractor_config().validate()?;
        if self.top_words < 1 {
            return Err(Error::Config("top_words must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let c = PipelineConfig::default();
        assert_eq!(c.topics, 30);
        assert_eq!(c.top_words, 30);
        assert_eq!(c.confidence_threshold, 0.5);
        assert!(c.lda_config().is_err());
        let lda = PipelineConfig { seed: Some(1), ..c }.lda_config().unwrap();
        assert_eq!(lda.alpha(), 50.0 / 30.0);
        assert_eq!(lda.beta, 0.01);
    }

    #[test]
    fn load_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(
            &path,
            r#"{"corpus": "corpus.jsonl", "subset": "ids.txt", "topics": 4, "seed": 7, "out": "/tmp/abs"}"#,
        )
        .unwrap();
        let c = PipelineConfig::load(&path).unwrap();
        assert_eq!(c.corpus, Some(dir.path().join("corpus.jsonl")));
        assert_eq!(
            c.subset,
            Some(SubsetSelector::File(dir.path().join("ids.txt")))
        );
        assert_eq!(c.out, PathBuf::from("/tmp/abs"));
        assert_eq!(c.topics, 4);
        assert_eq!(c.top_words, 30);
    }

    #[test]
    fn subset_as_id_list_and_unknown_fields() {
        let c: PipelineConfig = serde_json::from_str(r#"{"subset": ["a", "b"]}"#).unwrap();
        assert_eq!(
            c.subset,
            Some(SubsetSelector::Ids(vec!["a".into(), "b".into()]))
        );
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"topcs": 3}"#).is_err());
    }
}
