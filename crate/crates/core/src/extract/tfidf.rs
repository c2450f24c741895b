use std::collections::{HashMap, HashSet};

use crate::corpus::{phrase_runs, tokenize, Document, StopwordList};
use crate::error::{Error, Result};

use super::{
    candidate_phrases, normalize_and_select, ComplexTag, ExtractorConfig, KeywordExtractor,
};

/// `tf * ln(corpus_size / df)`.
///
/// A zero term frequency always weighs zero. A positive term frequency with
/// `df == 0` means the statistics were built over a different corpus.
pub fn tfidf_weight(tf: u32, df: u32, corpus_size: usize) -> Result<f64> {
    if tf == 0 {
        return Ok(0.0);
    }
    if df == 0 || corpus_size == 0 {
        return Err(Error::InconsistentStats {
            term: String::new(),
            tf,
        });
    }
    Ok(f64::from(tf) * (corpus_size as f64 / f64::from(df)).ln())
}

/// Corpus-wide document frequencies.
#[derive(Debug, Clone, Default)]
pub struct TermStats {
    doc_freq: HashMap<String, u32>,
    corpus_size: usize,
}

impl TermStats {
    pub fn build(docs: &[Document], stopwords: &StopwordList) -> Self {
        Self::from_token_streams(docs.iter().map(|d| tokenize(&d.text(), stopwords).tokens))
    }

    pub fn from_token_streams<I, T, S>(streams: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut stats = TermStats::default();
        for stream in streams {
            stats.corpus_size += 1;
            let distinct: HashSet<String> =
                stream.into_iter().map(|s| s.as_ref().to_string()).collect();
            for term in distinct {
                *stats.doc_freq.entry(term).or_insert(0) += 1;
            }
        }
        stats
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn document_frequency(&self, term: &str) -> u32 {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.doc_freq.len()
    }

    /// Weight of `term` in a document where it occurs `tf` times.
    pub fn weight(&self, term: &str, tf: u32) -> Result<f64> {
        tfidf_weight(tf, self.document_frequency(term), self.corpus_size).map_err(|e| match e {
            Error::InconsistentStats { tf, .. } => Error::InconsistentStats {
                term: term.to_string(),
                tf,
            },
            e => e,
        })
    }
}

/// Term counts of one token stream.
pub fn term_frequencies<'a>(tokens: impl IntoIterator<Item = &'a str>) -> HashMap<&'a str, u32> {
    let mut tf = HashMap::new();
    for t in tokens {
        *tf.entry(t).or_insert(0) += 1;
    }
    tf
}

pub struct TfidfExtractor {
    stats: TermStats,
    stopwords: StopwordList,
    config: ExtractorConfig,
}

impl TfidfExtractor {
    pub fn new(stats: TermStats, stopwords: StopwordList, config: ExtractorConfig) -> Self {
        TfidfExtractor {
            stats,
            stopwords,
            config,
        }
    }

    pub fn stats(&self) -> &TermStats {
        &self.stats
    }

    /// Raw (unnormalized) score of every candidate phrase occurrence.
    pub fn phrase_scores(&self, doc: &Document) -> Result<Vec<(String, f64)>> {
        let runs = phrase_runs(&doc.text(), &self.stopwords);
        let tf = term_frequencies(runs.iter().flatten().map(String::as_str));
        let mut weights: HashMap<&str, f64> = HashMap::with_capacity(tf.len());
        for (&term, &count) in &tf {
            weights.insert(term, self.stats.weight(term, count)?);
        }
        Ok(candidate_phrases(&runs, self.config.max_phrase_len)
            .into_iter()
            .map(|chunk| {
                let score = chunk.iter().map(|t| weights[t.as_str()]).sum();
                (chunk.join(" "), score)
            })
            .collect())
    }
}

impl KeywordExtractor for TfidfExtractor {
    fn extract(&self, doc: &Document) -> Result<Vec<ComplexTag>> {
        Ok(normalize_and_select(self.phrase_scores(doc)?, &self.config))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_examples() {
        assert_eq!(tfidf_weight(5, 4, 4).unwrap(), 0.0);
        let w = tfidf_weight(3, 2, 4).unwrap();
        assert!((w - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!((w - 2.0794).abs() < 1e-4);
        assert_eq!(tfidf_weight(0, 0, 4).unwrap(), 0.0);
        assert_eq!(tfidf_weight(0, 3, 4).unwrap(), 0.0);
        assert!(matches!(
            tfidf_weight(2, 0, 4),
            Err(Error::InconsistentStats { tf: 2, .. })
        ));
    }

    #[test]
    fn single_document_term_is_tf_ln_n() {
        let stats = TermStats::from_token_streams(vec![
            vec!["rare", "rare", "common"],
            vec!["common"],
            vec!["common", "other"],
        ]);
        assert_eq!(stats.weight("rare", 2).unwrap(), 2.0 * 3f64.ln());
        assert_eq!(stats.weight("common", 1).unwrap(), 0.0);
        let err = stats.weight("missing", 1).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }

    fn toy_corpus() -> Vec<Document> {
        vec![
            Document::new(
                "d1",
                "Quantum computing. Market report, industry outlook. Grid demand.",
            ),
            Document::new(
                "d2",
                "Cloud security. Market report, industry outlook; grid.",
            ),
            Document::new("d3", "Battery storage! Market report, industry outlook."),
        ]
    }

    #[test]
    fn distinctive_bigram_wins() {
        let docs = toy_corpus();
        let stop = StopwordList::default();
        let extractor = TfidfExtractor::new(
            TermStats::build(&docs, &stop),
            stop.clone(),
            ExtractorConfig::default(),
        );
        // By hand: bigram tokens each occur once in one of three docs, so the
        // bigram scores 2 ln 3. In d1, "grid demand" scores ln(3/2) + ln 3,
        // giving confidence (ln 1.5 + ln 3) / (2 ln 3) ~ 0.684.
        let expected_top = ["quantum computing", "cloud security", "battery storage"];
        for (doc, top) in docs.iter().zip(expected_top) {
            let tags = extractor.extract(doc).unwrap();
            assert_eq!(tags[0], ComplexTag::new(top, 1.0), "doc {}", doc.id);
        }
        let d1 = extractor.extract(&docs[0]).unwrap();
        assert_eq!(d1.len(), 2);
        assert_eq!(d1[1].phrase, "grid demand");
        let expected = (1.5f64.ln() + 3f64.ln()) / (2.0 * 3f64.ln());
        assert!((d1[1].confidence - expected).abs() < 1e-12);
        // "grid" in d2 scores ln 1.5 / (2 ln 3) ~ 0.18 and is filtered.
        assert_eq!(extractor.extract(&docs[1]).unwrap().len(), 1);
    }

    #[test]
    fn uniform_corpus_yields_no_tags() {
        let docs = vec![
            Document::new("a", "market report growth"),
            Document::new("b", "growth market report"),
        ];
        let stop = StopwordList::default();
        let extractor = TfidfExtractor::new(
            TermStats::build(&docs, &stop),
            stop,
            ExtractorConfig::default(),
        );
        assert!(extractor.extract(&docs[0]).unwrap().is_empty());
        assert!(extractor
            .extract(&Document::new("e", ""))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unseen_terms_are_inconsistent() {
        let stop = StopwordList::default();
        let extractor = TfidfExtractor::new(
            TermStats::build(&[Document::new("a", "alpha")], &stop),
            stop,
            ExtractorConfig::default(),
        );
        assert!(extractor.extract(&Document::new("z", "omega")).is_err());
    }
}
