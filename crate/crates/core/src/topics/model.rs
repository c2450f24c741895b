use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bags::Vocabulary;
use super::lda::{LdaConfig, RNG_ALGORITHM, UNIFORM_ALGORITHM};

const ROW_TOLERANCE: f64 = 1e-9;

/// A fitted topic model. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    config: LdaConfig,
    vocabulary: Vocabulary,
    phi: Vec<Vec<f64>>,
    doc_ids: Vec<String>,
    theta: Vec<Vec<f64>>,
    excluded: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perplexity {
    pub value: f64,
    pub evaluated_tokens: usize,
    pub skipped_tokens: usize,
}

fn check_rows(name: &str, rows: &[Vec<f64>], width: usize) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Model(format!(
                "{name} row {i} has {} entries, expected {width}",
                row.len()
            )));
        }
        if let Some(x) = row.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::Model(format!(
                "{name} row {i} has non-positive entry {x}"
            )));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(Error::Model(format!("{name} row {i} sums to {sum}")));
        }
    }
    Ok(())
}

impl TopicModel {
    /// Validates shapes, strict positivity and row sums (1 within 1e-9).
    pub fn from_parts(
        config: LdaConfig,
        vocabulary: Vocabulary,
        phi: Vec<Vec<f64>>,
        doc_ids: Vec<String>,
        theta: Vec<Vec<f64>>,
        excluded: Vec<String>,
    ) -> Result<Self> {
        if phi.len() != config.topics {
            return Err(Error::Model(format!(
                "phi has {} rows for {} topics",
                phi.len(),
                config.topics
            )));
        }
        if doc_ids.len() != theta.len() {
            return Err(Error::Model(format!(
                "{} theta rows for {} documents",
                theta.len(),
                doc_ids.len()
            )));
        }
        check_rows("phi", &phi, vocabulary.len())?;
        check_rows("theta", &theta, config.topics)?;
        Ok(TopicModel {
            config,
            vocabulary,
            phi,
            doc_ids,
            theta,
            excluded,
        })
    }

    pub fn config(&self) -> &LdaConfig {
        &self.config
    }

    pub fn topics(&self) -> usize {
        self.phi.len()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn phi(&self) -> &[Vec<f64>] {
        &self.phi
    }

    pub fn theta(&self) -> &[Vec<f64>] {
        &self.theta
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn excluded(&self) -> &[String] {
        &self.excluded
    }

    /// The `m` most probable words of topic `k`: descending probability,
    /// ties in ascending lexicographic order.
    pub fn top_words(&self, k: usize, m: usize) -> Result<Vec<(String, f64)>> {
        let row = self.phi.get(k).ok_or(Error::TopicOutOfRange {
            index: k,
            topics: self.topics(),
        })?;
        if m == 0 {
            return Err(Error::Config("top-word count must be at least 1".into()));
        }
        let words = self.vocabulary.words();
        let mut ranked: Vec<usize> = (0..row.len()).collect();
        ranked.sort_by(|&a, &b| {
            row[b]
                .total_cmp(&row[a])
                .then_with(|| words[a].cmp(&words[b]))
        });
        ranked.truncate(m);
        Ok(ranked
            .into_iter()
            .map(|w| (words[w].clone(), row[w]))
            .collect())
    }

    /// `exp(-sum(log p(w|d)) / N)` with `p(w|d) = sum_k theta[d][k] phi[k][w]`.
    /// Out-of-vocabulary tokens are skipped and counted.
    pub fn perplexity(&self, docs: &[(String, Vec<String>)]) -> Result<Perplexity> {
        let mut log_likelihood = 0.0;
        let mut evaluated = 0usize;
        let mut skipped = 0usize;
        for (id, words) in docs {
            let d = self
                .doc_ids
                .iter()
                .position(|x| x == id)
                .ok_or_else(|| Error::UnknownDocument(id.clone()))?;
            let theta = &self.theta[d];
            for word in words {
                let Some(w) = self.vocabulary.id(word) else {
                    skipped += 1;
                    continue;
                };
                let p: f64 = theta
                    .iter()
                    .zip(&self.phi)
                    .map(|(t, row)| t * row[w as usize])
                    .sum();
                log_likelihood += p.ln();
                evaluated += 1;
            }
        }
        if evaluated == 0 {
            return Err(Error::NoEvaluableTokens);
        }
        Ok(Perplexity {
            value: (-log_likelihood / evaluated as f64).exp(),
            evaluated_tokens: evaluated,
            skipped_tokens: skipped,
        })
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            config: ModelFileConfig {
                topics: self.config.topics,
                alpha: self.config.alpha(),
                beta: self.config.beta,
                sweeps: self.config.sweeps,
                burn_in: self.config.burn_in,
                thinning: self.config.thinning,
                seed: self.config.seed,
                rng: RNG_ALGORITHM.to_string(),
                uniform: UNIFORM_ALGORITHM.to_string(),
            },
            vocabulary: self.vocabulary.clone(),
            phi: self.phi.clone(),
            theta: self
                .doc_ids
                .iter()
                .cloned()
                .zip(self.theta.iter().cloned())
                .collect(),
            excluded: self.excluded.clone(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("model serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if file.config.rng != RNG_ALGORITHM {
            return Err(format!("unsupported RNG {:?}", file.config.rng));
        }
        let config = LdaConfig {
            topics: file.config.topics,
            alpha: Some(file.config.alpha),
            beta: file.config.beta,
            sweeps: file.config.sweeps,
            burn_in: file.config.burn_in,
            thinning: file.config.thinning,
            seed: file.config.seed,
        };
        let (doc_ids, theta) = file.theta.into_iter().unzip();
        TopicModel::from_parts(
            config,
            file.vocabulary,
            file.phi,
            doc_ids,
            theta,
            file.excluded,
        )
        .map_err(|e| e.to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|message| Error::parse(path, 1, message))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    config: ModelFileConfig,
    vocabulary: Vocabulary,
    phi: Vec<Vec<f64>>,
    theta: IndexMap<String, Vec<f64>>,
    excluded: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFileConfig {
    topics: usize,
    alpha: f64,
    beta: f64,
    sweeps: usize,
    burn_in: usize,
    thinning: usize,
    seed: u64,
    rng: String,
    uniform: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hand_model(words: &[&str], phi: Vec<Vec<f64>>) -> TopicModel {
        let topics = phi.len();
        TopicModel::from_parts(
            LdaConfig {
                topics,
                ..LdaConfig::new(0)
            },
            Vocabulary::from_words(words.iter().copied()).unwrap(),
            phi,
            vec!["d".into()],
            vec![vec![1.0 / topics as f64; topics]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn top_words_sorted_and_truncated() {
        let model = hand_model(&["c", "a", "b"], vec![vec![0.2, 0.5, 0.3]]);
        assert_eq!(
            model.top_words(0, 2).unwrap(),
            vec![("a".to_string(), 0.5), ("b".to_string(), 0.3)]
        );
        let all = model.top_words(0, 10).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(all[2].0, "c");
    }

    #[test]
    fn top_words_tie_break_is_lexicographic() {
        let model = hand_model(&["zulu", "alpha", "mike"], vec![vec![0.4, 0.4, 0.2]]);
        let words: Vec<_> = model
            .top_words(0, 3)
            .unwrap()
            .into_iter()
            .map(|(w, _)| w)
            .collect();
        assert_eq!(words, ["alpha", "zulu", "mike"]);
    }

    #[test]
    fn top_words_errors() {
        let model = hand_model(&["a"], vec![vec![1.0]]);
        assert!(matches!(
            model.top_words(1, 1),
            Err(Error::TopicOutOfRange {
                index: 1,
                topics: 1
            })
        ));
        assert!(model.top_words(0, 0).is_err());
    }

    #[test]
    fn perplexity_degenerate_and_uniform() {
        let single = hand_model(&["only"], vec![vec![1.0]]);
        let p = single
            .perplexity(&[("d".into(), vec!["only".into(), "only".into(), "oov".into()])])
            .unwrap();
        assert!((p.value - 1.0).abs() < 1e-6);
        assert_eq!(p.evaluated_tokens, 2);
        assert_eq!(p.skipped_tokens, 1);

        let v = 8;
        let words: Vec<String> = (0..v).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let uniform = hand_model(&refs, vec![vec![1.0 / v as f64; v]; 2]);
        let p = uniform.perplexity(&[("d".into(), words.clone())]).unwrap();
        assert!((p.value - v as f64).abs() < 1e-9);
    }

    #[test]
    fn perplexity_errors() {
        let model = hand_model(&["a"], vec![vec![1.0]]);
        assert!(matches!(
            model.perplexity(&[("d".into(), vec!["zzz".into()])]),
            Err(Error::NoEvaluableTokens)
        ));
        assert!(matches!(
            model.perplexity(&[("nope".into(), vec!["a".into()])]),
            Err(Error::UnknownDocument(_))
        ));
    }

    #[test]
    fn rejects_bad_rows() {
        let vocab = Vocabulary::from_words(["a", "b"]).unwrap();
        let cfg = LdaConfig {
            topics: 1,
            ..LdaConfig::new(0)
        };
        assert!(TopicModel::from_parts(
            cfg.clone(),
            vocab.clone(),
            vec![vec![0.6, 0.6]],
            vec![],
            vec![],
            vec![]
        )
        .is_err());
        assert!(
            TopicModel::from_parts(cfg, vocab, vec![vec![1.0, 0.0]], vec![], vec![], vec![])
                .is_err()
        );
    }

    #[test]
    fn json_round_trip() {
        let model = hand_model(
            &["a", "b", "c"],
            vec![vec![0.1, 0.2, 0.7], vec![0.3, 0.3, 0.4]],
        );
        let json = model.to_json();
        assert!(json.contains(RNG_ALGORITHM));
        let back = TopicModel::from_json(&json).unwrap();
        assert_eq!(back.phi(), model.phi());
        assert_eq!(back.theta(), model.theta());
        assert_eq!(back.to_json(), json);
    }
}
