use std::collections::{BTreeSet, HashMap};

use crate::corpus::{phrase_runs, tokenize, Document, StopwordList};
use crate::error::Result;

use super::{
    candidate_phrases, normalize_and_select, ComplexTag, ExtractorConfig, KeywordExtractor,
};

/// Tokens at most `WINDOW - 1` positions apart are linked.
pub const WINDOW: usize = 4;
pub const DAMPING: f64 = 0.85;
pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 100;

/// Undirected, unweighted co-occurrence graph over distinct tokens.
#[derive(Debug, Clone, Default)]
pub struct CooccurrenceGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    neighbors: Vec<BTreeSet<usize>>,
}

impl CooccurrenceGraph {
    /// Nodes are numbered in order of first occurrence. Self-loops are
    /// never added.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], window: usize) -> Self {
        let mut graph = CooccurrenceGraph::default();
        let ids: Vec<usize> = tokens.iter().map(|t| graph.intern(t.as_ref())).collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in ids.iter().skip(i + 1).take(window.saturating_sub(1)) {
                if a != b {
                    graph.neighbors[a].insert(b);
                    graph.neighbors[b].insert(a);
                }
            }
        }
        graph
    }

    fn intern(&mut self, token: &str) -> usize {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(token.to_string());
        self.index.insert(token.to_string(), id);
        self.neighbors.push(BTreeSet::new());
        id
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[node].iter().copied()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    /// Damped iterative ranking. Every node starts at 1.0 and is updated
    /// from the previous iterate:
    /// `score(v) = (1 - d) + d * sum(score(u) / degree(u))` over neighbors `u`.
    pub fn rank(&self, damping: f64, tolerance: f64, max_iterations: usize) -> Vec<f64> {
        let n = self.nodes.len();
        let mut scores = vec![1.0; n];
        for _ in 0..max_iterations {
            let next: Vec<f64> = (0..n)
                .map(|v| {
                    let inflow: f64 = self.neighbors[v]
                        .iter()
                        .map(|&u| scores[u] / self.neighbors[u].len() as f64)
                        .sum();
                    (1.0 - damping) + damping * inflow
                })
                .collect();
            let delta = next
                .iter()
                .zip(&scores)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            scores = next;
            if delta < tolerance {
                break;
            }
        }
        scores
    }
}

pub struct GraphExtractor {
    stopwords: StopwordList,
    config: ExtractorConfig,
}

impl GraphExtractor {
    pub fn new(stopwords: StopwordList, config: ExtractorConfig) -> Self {
        GraphExtractor { stopwords, config }
    }

    /// Rank of every distinct token of the document.
    pub fn token_ranks(&self, doc: &Document) -> HashMap<String, f64> {
        let tokens = tokenize(&doc.text(), &self.stopwords).tokens;
        let graph = CooccurrenceGraph::from_tokens(&tokens, WINDOW);
        let scores = graph.rank(DAMPING, TOLERANCE, MAX_ITERATIONS);
        graph.nodes.into_iter().zip(scores).collect()
    }
}

impl KeywordExtractor for GraphExtractor {
    fn extract(&self, doc: &Document) -> Result<Vec<ComplexTag>> {
        let ranks = self.token_ranks(doc);
        let runs = phrase_runs(&doc.text(), &self.stopwords);
        let scored = candidate_phrases(&runs, self.config.max_phrase_len)
            .into_iter()
            .map(|chunk| {
                let score = chunk.iter().map(|t| ranks[t.as_str()]).sum();
                (chunk.join(" "), score)
            })
            .collect();
        Ok(normalize_and_select(scored, &self.config))
    }
}
