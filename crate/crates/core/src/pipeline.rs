//! File-to-file pipeline stages: extract, model, apply, report.
//!
//! Every stage reads its inputs from disk and writes its outputs into the
//! configured output directory, so the model stage can be re-run against a
//! stable cache without re-extracting.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::apply::{load_assignments, save_assignments, TagApplier, TagAssignment};
use crate::config::{PipelineConfig, SubsetSelector};
use crate::corpus::{ingest_corpus, Document, StopwordList};
use crate::error::Error;
use crate::extract::{extract_corpus, ComplexTagCache, Extractor};
use crate::report::{build_report, emit_histogram_csv, TaggingReport};
use crate::tagset::{generate_tagset, SimpleTagSet};
use crate::topics::{build_keyword_documents, fit, Perplexity, TopicModel};

pub const CACHE_FILE: &str = "complex_tags.jsonl";
pub const MODEL_FILE: &str = "model.json";
pub const TAG_FILE: &str = "tags.txt";
pub const ASSIGNMENT_FILE: &str = "assignments.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Bad usage or unmet precondition (exit code 2).
    #[error("{0}")]
    Precondition(String),
    /// Anything else (exit code 1).
    #[error(transparent)]
    Internal(#[from] Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Precondition(_) => 2,
            PipelineError::Internal(_) => 1,
        }
    }
}

pub type StageResult<T> = std::result::Result<T, PipelineError>;

fn precondition(e: Error) -> PipelineError {
    PipelineError::Precondition(e.to_string())
}

fn require_file(path: &Path, what: &str) -> StageResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(PipelineError::Precondition(format!(
            "{what} not found: {}",
            path.display()
        )))
    }
}

fn create_out_dir(config: &PipelineConfig) -> StageResult<()> {
    std::fs::create_dir_all(&config.out).map_err(|e| {
        PipelineError::Internal(Error::Io {
            path: config.out.clone(),
            source: e,
        })
    })
}

pub fn stopwords(config: &PipelineConfig) -> StageResult<StopwordList> {
    match &config.stopwords {
        Some(path) => {
            require_file(path, "stopword file")?;
            Ok(StopwordList::load(path)?)
        }
        None => Ok(StopwordList::default()),
    }
}

pub fn load_corpus(config: &PipelineConfig) -> StageResult<Vec<Document>> {
    let path = config
        .corpus
        .as_ref()
        .ok_or_else(|| PipelineError::Precondition("no corpus path configured".into()))?;
    require_file(path, "corpus file")?;
    ingest_corpus(path).map_err(precondition)
}

/// Ids of the extraction subset, in selector order, or `None` for the whole
/// corpus.
pub fn subset_ids(config: &PipelineConfig) -> StageResult<Option<Vec<String>>> {
    let mut ids = match &config.subset {
        None => return Ok(None),
        Some(SubsetSelector::Ids(ids)) => ids.clone(),
        Some(SubsetSelector::File(path)) => {
            require_file(path, "subset file")?;
            std::fs::read_to_string(path)
                .map_err(|e| {
                    PipelineError::Internal(Error::Io {
                        path: path.clone(),
                        source: e,
                    })
                })?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect()
        }
    };
    if let Some(limit) = config.subset_limit {
        ids.truncate(limit);
    }
    Ok(Some(ids))
}

fn select_documents<'a>(
    docs: &'a [Document],
    ids: Option<&[String]>,
) -> StageResult<Vec<&'a Document>> {
    let Some(ids) = ids else {
        return Ok(docs.iter().collect());
    };
    let wanted: HashSet<&str> = ids.iter().map(String::as_str).collect();
    let known: HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    if let Some(missing) = ids.iter().find(|id| !known.contains(id.as_str())) {
        return Err(PipelineError::Precondition(format!(
            "subset id {missing:?} is not in the corpus"
        )));
    }
    Ok(docs
        .iter()
        .filter(|d| wanted.contains(d.id.as_str()))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractSummary {
    pub cache_path: PathBuf,
    pub documents: usize,
    pub errors: Vec<(String, String)>,
}

/// Extract complex tags for the subset (or the whole corpus). Document
/// frequencies for the tf-idf backend always come from the whole corpus.
pub fn cmd_extract(config: &PipelineConfig) -> StageResult<ExtractSummary> {
    config.validate().map_err(precondition)?;
    let stop = stopwords(config)?;
    let docs = load_corpus(config)?;
    let ids = subset_ids(config)?;
    let selected: Vec<Document> = select_documents(&docs, ids.as_deref())?
        .into_iter()
        .cloned()
        .collect();
    let extractor =
        Extractor::from_config(&config.extractor_config(), &docs, &stop).map_err(precondition)?;
    let cache = extract_corpus(&selected, &extractor);
    create_out_dir(config)?;
    let cache_path = config.out.join(CACHE_FILE);
    cache.save(&cache_path)?;
    Ok(ExtractSummary {
        cache_path,
        documents: cache.len(),
        errors: cache
            .errors()
            .map(|r| (r.id.clone(), r.error.clone().unwrap_or_default()))
            .collect(),
    })
}

#[derive(Debug, Clone)]
pub struct ModelSummary {
    pub model_path: PathBuf,
    pub tag_path: PathBuf,
    pub tag_count: usize,
    pub candidate_count: usize,
    pub dedupe_ratio: f64,
    pub filtered: usize,
    pub fitted_documents: usize,
    pub excluded_documents: usize,
    pub perplexity: Perplexity,
}

pub fn cmd_model(config: &PipelineConfig, cache_path: Option<&Path>) -> StageResult<ModelSummary> {
    config.validate().map_err(precondition)?;
    let lda = config.lda_config().map_err(precondition)?;
    let stop = stopwords(config)?;
    let default_cache = config.out.join(CACHE_FILE);
    let cache_path = cache_path.unwrap_or(&default_cache);
    require_file(cache_path, "complex-tag cache")?;
    let cache = ComplexTagCache::load(cache_path).map_err(precondition)?;
    let corpus = build_keyword_documents(&cache, &stop).map_err(|e| match e {
        Error::EmptyCorpus => PipelineError::Precondition(format!(
            "complex-tag cache {} has no usable keywords",
            cache_path.display()
        )),
        e => PipelineError::Internal(e),
    })?;
    let model = fit(&corpus, &lda)?;
    let perplexity = model.perplexity(&corpus.token_strings())?;
    let tagset = generate_tagset(&model, config.top_words, &stop)?;

    create_out_dir(config)?;
    let model_path = config.out.join(MODEL_FILE);
    let tag_path = config.out.join(TAG_FILE);
    model.save(&model_path)?;
    tagset.save(&tag_path)?;
    let candidate_count = lda.topics * config.top_words;
    Ok(ModelSummary {
        model_path,
        tag_path,
        tag_count: tagset.len(),
        candidate_count,
        dedupe_ratio: tagset.len() as f64 / candidate_count as f64,
        filtered: tagset.generation().map_or(0, |g| g.filtered),
        fitted_documents: corpus.documents.len(),
        excluded_documents: corpus.excluded.len(),
        perplexity,
    })
}

/// Regenerate the tag set from a saved model file.
pub fn tagset_from_model_file(
    path: &Path,
    m: usize,
    stop: &StopwordList,
) -> StageResult<SimpleTagSet> {
    require_file(path, "model file")?;
    let model = TopicModel::load(path).map_err(precondition)?;
    Ok(generate_tagset(&model, m, stop)?)
}

#[derive(Debug, Clone)]
pub struct ApplySummary {
    pub assignment_path: PathBuf,
    pub assignments: Vec<TagAssignment>,
    pub from_cache: usize,
}

pub fn cmd_apply(
    config: &PipelineConfig,
    tag_path: Option<&Path>,
    cache_path: Option<&Path>,
) -> StageResult<ApplySummary> {
    config.validate().map_err(precondition)?;
    let stop = stopwords(config)?;
    let default_tags = config.out.join(TAG_FILE);
    let tag_path = tag_path.unwrap_or(&default_tags);
    require_file(tag_path, "tag file")?;
    let tagset = SimpleTagSet::load(tag_path).map_err(precondition)?;
    let docs = load_corpus(config)?;

    let cache = match cache_path {
        Some(p) => {
            require_file(p, "complex-tag cache")?;
            Some(ComplexTagCache::load(p).map_err(precondition)?)
        }
        None => {
            let p = config.out.join(CACHE_FILE);
            if p.is_file() {
                Some(ComplexTagCache::load(&p).map_err(precondition)?)
            } else {
                None
            }
        }
    };

    let ex_config = config.extractor_config();
    let extractor = Extractor::from_config(&ex_config, &docs, &stop).map_err(precondition)?;
    let applier =
        TagApplier::new(&tagset, &stop, ex_config.confidence_threshold).map_err(precondition)?;
    let assignments = applier.apply_corpus(&docs, &extractor, cache.as_ref());

    create_out_dir(config)?;
    let assignment_path = config.out.join(ASSIGNMENT_FILE);
    save_assignments(&assignment_path, &assignments)?;
    let from_cache = assignments
        .iter()
        .filter(|a| a.source == crate::apply::TagSource::Cache)
        .count();
    Ok(ApplySummary {
        assignment_path,
        assignments,
        from_cache,
    })
}

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub report_path: PathBuf,
    pub histogram_path: PathBuf,
    pub report: TaggingReport,
}

pub fn cmd_report(
    config: &PipelineConfig,
    assignment_path: Option<&Path>,
) -> StageResult<ReportSummary> {
    let default_path = config.out.join(ASSIGNMENT_FILE);
    let path = assignment_path.unwrap_or(&default_path);
    require_file(path, "assignment file")?;
    let assignments = load_assignments(path).map_err(precondition)?;
    let report = build_report(&assignments);
    create_out_dir(config)?;
    let report_path = config.out.join(REPORT_FILE);
    let histogram_path = config.out.join(HISTOGRAM_FILE);
    report.save(&report_path)?;
    std::fs::write(&histogram_path, emit_histogram_csv(&report)).map_err(|e| Error::Io {
        path: histogram_path.clone(),
        source: e,
    })?;
    Ok(ReportSummary {
        report_path,
        histogram_path,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub extract: ExtractSummary,
    pub model: ModelSummary,
    pub apply: ApplySummary,
    pub report: ReportSummary,
}

/// All four stages in order. Preconditions of later stages that do not
/// depend on earlier outputs are checked before anything is written.
pub fn cmd_run(config: &PipelineConfig) -> StageResult<RunSummary> {
    config.validate().map_err(precondition)?;
    config.lda_config().map_err(precondition)?;
    let extract = cmd_extract(config)?;
    let model = cmd_model(config, Some(&extract.cache_path))?;
    let apply = cmd_apply(config, Some(&model.tag_path), Some(&extract.cache_path))?;
    let report = cmd_report(config, Some(&apply.assignment_path))?;
    Ok(RunSummary {
        extract,
        model,
        apply,
        report,
    })
}
