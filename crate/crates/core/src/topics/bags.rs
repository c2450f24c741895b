use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{tokenize, StopwordList};
use crate::error::{Error, Result};
use crate::extract::ComplexTagCache;

/// Dense bijection between tokens and ids `0..len()`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        for w in words {
            let w = w.into();
            if vocab.ids.contains_key(&w) {
                return Err(Error::Model(format!("duplicate vocabulary entry {w:?}")));
            }
            vocab.intern(&w);
        }
        Ok(vocab)
    }

    pub fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = u32::try_from(self.words.len()).expect("vocabulary exceeds u32::MAX entries");
        self.words.push(word.to_string());
        self.ids.insert(word.to_string(), id);
        id
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: u32) -> Option<&str> {
        self.words.get(id as usize).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.words.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let words = Vec::<String>::deserialize(deserializer)?;
        Vocabulary::from_words(words).map_err(serde::de::Error::custom)
    }
}

/// Token-id occurrences of one document's keywords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordBag {
    pub id: String,
    pub tokens: Vec<u32>,
}

/// LDA input: vocabulary, the non-empty bags, and the ids of documents whose
/// bags came out empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordCorpus {
    pub vocabulary: Vocabulary,
    pub documents: Vec<KeywordBag>,
    pub excluded: Vec<String>,
}

impl KeywordCorpus {
    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Every bag as (document id, token strings).
    pub fn token_strings(&self) -> Vec<(String, Vec<String>)> {
        self.documents
            .iter()
            .map(|d| {
                let words = d
                    .tokens
                    .iter()
                    .map(|&t| self.vocabulary.words[t as usize].clone())
                    .collect();
                (d.id.clone(), words)
            })
            .collect()
    }

    /// Build directly from token lists; used for synthetic corpora.
    pub fn from_token_lists<I, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut vocabulary = Vocabulary::new();
        let mut documents = Vec::new();
        let mut excluded = Vec::new();
        for (id, words) in docs {
            let tokens: Vec<u32> = words
                .iter()
                .map(|w| vocabulary.intern(w.as_ref()))
                .collect();
            if tokens.is_empty() {
                excluded.push(id);
            } else {
                documents.push(KeywordBag { id, tokens });
            }
        }
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(KeywordCorpus {
            vocabulary,
            documents,
            excluded,
        })
    }
}

/// Each complex-tag phrase is tokenized into unigrams; every occurrence adds
/// one token to its document's bag. Vocabulary ids follow first appearance in
/// cache order.
pub fn build_keyword_documents(
    cache: &ComplexTagCache,
    stopwords: &StopwordList,
) -> Result<KeywordCorpus> {
    KeywordCorpus::from_token_lists(cache.records.iter().map(|record| {
        let words: Vec<String> = record
            .tags
            .iter()
            .flat_map(|tag| tokenize(&tag.phrase, stopwords).tokens)
            .collect();
        (record.id.clone(), words)
    }))
}
