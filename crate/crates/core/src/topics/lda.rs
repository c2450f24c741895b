//! Collapsed Gibbs sampling for latent Dirichlet allocation.
//!
//! Topic-word and document-topic distributions are integrated out; only the
//! per-token topic assignments are sampled. The full conditional for a token
//! of word `w` in document `d`, with that token removed from every count, is
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + alpha) * (n_kw + beta) / (n_k + V * beta)
//! ```
//!
//! Estimates of phi and theta use counts averaged over the thinned
//! post-burn-in sweeps. The sample schedule is anchored at the last sweep, so
//! at least one sample is always taken.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bags::KeywordCorpus;
use super::model::TopicModel;

/// Generator recorded in model files; `u64` seeds are expanded with
/// `SeedableRng::seed_from_u64`.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64";
/// Recorded alongside [`RNG_ALGORITHM`].
pub const UNIFORM_ALGORITHM: &str = "(next_u64 >> 11) * 2^-53";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    /// Defaults to `50 / topics` when unset.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
}

impl LdaConfig {
    pub fn new(seed: u64) -> Self {
        LdaConfig {
            topics: 30,
            alpha: None,
            beta: 0.01,
            sweeps: 1000,
            burn_in: 800,
            thinning: 10,
            seed,
        }
    }

    pub fn with_topics(mut self, topics: usize) -> Self {
        self.topics = topics;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.topics as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.topics < 1 {
            return Err(Error::Config("number of topics must be at least 1".into()));
        }
        if self.topics > u16::MAX as usize {
            return Err(Error::Config(format!("at most {} topics", u16::MAX)));
        }
        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::Config(format!(
                "sweeps ({}) must exceed burn-in ({})",
                self.sweeps, self.burn_in
            )));
        }
        if self.thinning < 1 {
            return Err(Error::Config("thinning interval must be at least 1".into()));
        }
        Ok(())
    }

    /// True when the estimate accumulates counts after `sweep` (1-based).
    pub fn is_sample_sweep(&self, sweep: usize) -> bool {
        sweep > self.burn_in && (self.sweeps - sweep).is_multiple_of(self.thinning)
    }
}

/// Topic assignments and the count tables derived from them.
#[derive(Debug, Clone)]
pub struct GibbsState {
    topics: usize,
    vocab_size: usize,
    /// `z[d][i]`: topic of the i-th token of document d.
    z: Vec<Vec<u16>>,
    /// Row-major M x K.
    n_dk: Vec<u32>,
    /// Word-major V x K so the per-token loop reads contiguous memory.
    n_wk: Vec<u32>,
    n_k: Vec<u32>,
}

impl GibbsState {
    fn initialize(corpus: &KeywordCorpus, topics: usize, rng: &mut ChaCha8Rng) -> Self {
        let vocab_size = corpus.vocabulary.len();
        let mut state = GibbsState {
            topics,
            vocab_size,
            z: Vec::with_capacity(corpus.documents.len()),
            n_dk: vec![0; corpus.documents.len() * topics],
            n_wk: vec![0; vocab_size * topics],
            n_k: vec![0; topics],
        };
        for (d, doc) in corpus.documents.iter().enumerate() {
            let mut assignments = Vec::with_capacity(doc.tokens.len());
            for &w in &doc.tokens {
                let k = ((uniform(rng) * topics as f64) as usize).min(topics - 1);
                assignments.push(k as u16);
                state.n_dk[d * topics + k] += 1;
                state.n_wk[w as usize * topics + k] += 1;
                state.n_k[k] += 1;
            }
            state.z.push(assignments);
        }
        state
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn assignments(&self, doc: usize) -> &[u16] {
        &self.z[doc]
    }

    pub fn doc_topic(&self, doc: usize, topic: usize) -> u32 {
        self.n_dk[doc * self.topics + topic]
    }

    pub fn topic_word(&self, topic: usize, word: usize) -> u32 {
        self.n_wk[word * self.topics + topic]
    }

    pub fn topic_total(&self, topic: usize) -> u32 {
        self.n_k[topic]
    }

    /// Recounts every table from the assignments and checks the marginal
    /// identities against the stored counts.
    pub fn check_invariants(&self, corpus: &KeywordCorpus) -> std::result::Result<(), String> {
        let k = self.topics;
        let mut n_dk = vec![0u32; self.n_dk.len()];
        let mut n_wk = vec![0u32; self.n_wk.len()];
        let mut n_k = vec![0u32; k];
        for (d, doc) in corpus.documents.iter().enumerate() {
            if self.z[d].len() != doc.tokens.len() {
                return Err(format!(
                    "document {d} has {} assignments for {} tokens",
                    self.z[d].len(),
                    doc.tokens.len()
                ));
            }
            for (&w, &t) in doc.tokens.iter().zip(&self.z[d]) {
                let t = t as usize;
                if t >= k {
                    return Err(format!("assignment {t} out of range in document {d}"));
                }
                n_dk[d * k + t] += 1;
                n_wk[w as usize * k + t] += 1;
                n_k[t] += 1;
            }
            let row: u32 = self.n_dk[d * k..(d + 1) * k].iter().sum();
            if row as usize != doc.tokens.len() {
                return Err(format!(
                    "sum_k n_dk[{d}] = {row}, document length {}",
                    doc.tokens.len()
                ));
            }
        }
        for t in 0..k {
            let col: u32 = (0..self.vocab_size).map(|w| self.n_wk[w * k + t]).sum();
            if col != self.n_k[t] {
                return Err(format!("sum_w n_kw[{t}] = {col}, n_k = {}", self.n_k[t]));
            }
        }
        let total: usize = self.n_k.iter().map(|&c| c as usize).sum();
        if total != corpus.total_tokens() {
            return Err(format!(
                "sum_k n_k = {total}, corpus tokens {}",
                corpus.total_tokens()
            ));
        }
        if n_dk != self.n_dk || n_wk != self.n_wk || n_k != self.n_k {
            return Err("count tables disagree with assignments".into());
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct Sweeper<'a> {
    corpus: &'a KeywordCorpus,
    alpha: f64,
    beta: f64,
    vbeta: f64,
    weights: Vec<f64>,
}

impl Sweeper<'_> {
    fn sweep(&mut self, state: &mut GibbsState, rng: &mut ChaCha8Rng) {
        let k = state.topics;
        for (d, doc) in self.corpus.documents.iter().enumerate() {
            let doc_counts = d * k;
            for (i, &w) in doc.tokens.iter().enumerate() {
                let word_counts = w as usize * k;
                let old = state.z[d][i] as usize;
                state.n_dk[doc_counts + old] -= 1;
                state.n_wk[word_counts + old] -= 1;
                state.n_k[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    total += (f64::from(state.n_dk[doc_counts + t]) + self.alpha)
                        * (f64::from(state.n_wk[word_counts + t]) + self.beta)
                        / (f64::from(state.n_k[t]) + self.vbeta);
                    self.weights[t] = total;
                }
                let u = uniform(rng) * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                state.z[d][i] = new as u16;
                state.n_dk[doc_counts + new] += 1;
                state.n_wk[word_counts + new] += 1;
                state.n_k[new] += 1;
            }
        }
    }
}

/// Fit with no per-sweep observer.
pub fn fit(corpus: &KeywordCorpus, config: &LdaConfig) -> Result<TopicModel> {
    fit_with_observer(corpus, config, |_, _| {})
}

/// Fit, calling `observer(sweep, state)` after every sweep (1-based). Debug
/// builds verify the count identities after each sweep.
pub fn fit_with_observer<F>(
    corpus: &KeywordCorpus,
    config: &LdaConfig,
    mut observer: F,
) -> Result<TopicModel>
where
    F: FnMut(usize, &GibbsState),
{
    config.validate()?;
    if corpus.documents.is_empty() || corpus.vocabulary.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let k = config.topics;
    let v = corpus.vocabulary.len();
    let alpha = config.alpha();
    let beta = config.beta;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = GibbsState::initialize(corpus, k, &mut rng);
    let mut sweeper = Sweeper {
        corpus,
        alpha,
        beta,
        vbeta: v as f64 * beta,
        weights: vec![0.0; k],
    };

    let mut sum_dk = vec![0u64; state.n_dk.len()];
    let mut sum_wk = vec![0u64; state.n_wk.len()];
    let mut sum_k = vec![0u64; k];
    let mut samples = 0u64;

    for sweep in 1..=config.sweeps {
        sweeper.sweep(&mut state, &mut rng);
        if cfg!(debug_assertions) {
            state
                .check_invariants(corpus)
                .map_err(|message| Error::Invariant { sweep, message })?;
        }
        if config.is_sample_sweep(sweep) {
            samples += 1;
            for (acc, &c) in sum_dk.iter_mut().zip(&state.n_dk) {
                *acc += u64::from(c);
            }
            for (acc, &c) in sum_wk.iter_mut().zip(&state.n_wk) {
                *acc += u64::from(c);
            }
            for (acc, &c) in sum_k.iter_mut().zip(&state.n_k) {
                *acc += u64::from(c);
            }
        }
        observer(sweep, &state);
    }
    debug_assert!(samples > 0);

    let s = samples as f64;
    let vbeta = v as f64 * beta;
    let phi: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            let denom = sum_k[t] as f64 / s + vbeta;
            (0..v)
                .map(|w| (sum_wk[w * k + t] as f64 / s + beta) / denom)
                .collect()
        })
        .collect();
    let kalpha = k as f64 * alpha;
    let theta: Vec<Vec<f64>> = corpus
        .documents
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let denom = doc.tokens.len() as f64 + kalpha;
            (0..k)
                .map(|t| (sum_dk[d * k + t] as f64 / s + alpha) / denom)
                .collect()
        })
        .collect();

    TopicModel::from_parts(
        config.clone(),
        corpus.vocabulary.clone(),
        phi,
        corpus.documents.iter().map(|d| d.id.clone()).collect(),
        theta,
        corpus.excluded.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_corpus() -> KeywordCorpus {
        KeywordCorpus::from_token_lists(vec![
            ("a".to_string(), vec!["x", "y", "x", "z"]),
            ("b".to_string(), vec!["y", "y"]),
            ("c".to_string(), vec!["z", "w", "x"]),
        ])
        .unwrap()
    }

    fn quick(seed: u64, topics: usize) -> LdaConfig {
        LdaConfig {
            topics,
            sweeps: 60,
            burn_in: 20,
            ..LdaConfig::new(seed)
        }
    }

    #[test]
    fn config_validation() {
        assert!(LdaConfig::new(1).validate().is_ok());
        assert_eq!(LdaConfig::new(1).alpha(), 50.0 / 30.0);
        assert!(LdaConfig {
            topics: 0,
            ..LdaConfig::new(1)
        }
        .validate()
        .is_err());
        assert!(LdaConfig {
            beta: 0.0,
            ..LdaConfig::new(1)
        }
        .validate()
        .is_err());
        assert!(LdaConfig {
            alpha: Some(-1.0),
            ..LdaConfig::new(1)
        }
        .validate()
        .is_err());
        assert!(LdaConfig {
            sweeps: 800,
            ..LdaConfig::new(1)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn sample_schedule_is_anchored_at_last_sweep() {
        let c = LdaConfig::new(0);
        let sampled: Vec<usize> = (1..=c.sweeps).filter(|&s| c.is_sample_sweep(s)).collect();
        assert_eq!(sampled.len(), 20);
        assert_eq!(sampled[0], 810);
        assert_eq!(*sampled.last().unwrap(), 1000);
        let short = LdaConfig {
            sweeps: 5,
            burn_in: 4,
            ..LdaConfig::new(0)
        };
        assert!(short.is_sample_sweep(5));
    }

    #[test]
    fn single_topic_closed_form() {
        let corpus = small_corpus();
        let config = LdaConfig {
            beta: 0.1,
            ..quick(3, 1)
        };
        let model = fit(&corpus, &config).unwrap();
        let v = corpus.vocabulary.len();
        let total = corpus.total_tokens() as f64;
        let count = |word: &str| {
            corpus
                .token_strings()
                .iter()
                .flat_map(|(_, ws)| ws.clone())
                .filter(|w| w == word)
                .count() as f64
        };
        for (w, word) in corpus.vocabulary.words().iter().enumerate() {
            let expected = (count(word) + config.beta) / (total + v as f64 * config.beta);
            assert_eq!(model.phi()[0][w], expected, "word {word}");
        }
        for row in model.theta() {
            assert_eq!(row, &vec![1.0]);
        }
    }

    #[test]
    fn seeded_runs_are_bitwise_identical() {
        let corpus = small_corpus();
        let a = fit(&corpus, &quick(42, 3)).unwrap();
        let b = fit(&corpus, &quick(42, 3)).unwrap();
        assert_eq!(a.phi(), b.phi());
        assert_eq!(a.theta(), b.theta());
        let c = fit(&corpus, &quick(43, 3)).unwrap();
        assert_ne!(a.phi(), c.phi());
    }

    #[test]
    fn observer_sees_every_sweep_with_consistent_counts() {
        let corpus = small_corpus();
        let mut seen = 0;
        fit_with_observer(&corpus, &quick(7, 2), |sweep, state| {
            seen += 1;
            assert_eq!(sweep, seen);
            state.check_invariants(&corpus).unwrap();
        })
        .unwrap();
        assert_eq!(seen, 60);
    }
}
