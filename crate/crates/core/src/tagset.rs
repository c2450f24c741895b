//! The deduplicated set of unigram corpus tags drawn from topic top-words.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::StopwordList;
use crate::error::{Error, Result};
use crate::topics::TopicModel;

/// One appearance of a tag in a topic's top-word list. `rank` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagOccurrence {
    pub topic: usize,
    pub rank: usize,
    pub probability: f64,
}

/// Parameters the set was generated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    pub topics: usize,
    pub top_words: usize,
    /// Top-word entries dropped as stopwords or numerals.
    pub filtered: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimpleTagSet {
    tags: BTreeMap<String, Vec<TagOccurrence>>,
    generation: Option<Generation>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    topics: usize,
    top_words: usize,
    filtered: usize,
    provenance: BTreeMap<String, Vec<TagOccurrence>>,
}

fn validate_tag(tag: &str) -> std::result::Result<(), String> {
    if tag.is_empty() {
        return Err("empty tag".into());
    }
    if tag.chars().any(char::is_whitespace) {
        return Err(format!("tag {tag:?} contains whitespace"));
    }
    if tag.to_lowercase() != tag {
        return Err(format!("tag {tag:?} is not lowercase"));
    }
    Ok(())
}

fn is_numeral(word: &str) -> bool {
    word.chars().all(|c| c.is_numeric() || c == '-')
}

/// Union of `model.top_words(k, m)` over every topic, with each
/// (topic, rank) occurrence kept as provenance. Stopwords and numerals that
/// reach a top-word list are dropped and counted in
/// [`Generation::filtered`].
pub fn generate_tagset(
    model: &TopicModel,
    m: usize,
    stopwords: &StopwordList,
) -> Result<SimpleTagSet> {
    let mut tags: BTreeMap<String, Vec<TagOccurrence>> = BTreeMap::new();
    let mut filtered = 0;
    for topic in 0..model.topics() {
        for (i, (word, probability)) in model.top_words(topic, m)?.into_iter().enumerate() {
            if stopwords.contains(&word) || is_numeral(&word) || validate_tag(&word).is_err() {
                filtered += 1;
                continue;
            }
            tags.entry(word).or_default().push(TagOccurrence {
                topic,
                rank: i + 1,
                probability,
            });
        }
    }
    Ok(SimpleTagSet {
        tags,
        generation: Some(Generation {
            topics: model.topics(),
            top_words: m,
            filtered,
        }),
    })
}

impl SimpleTagSet {
    /// A set without provenance.
    pub fn from_tags<I, S>(tags: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = SimpleTagSet::default();
        for tag in tags {
            let tag = tag.into();
            validate_tag(&tag).map_err(Error::Config)?;
            set.tags.entry(tag).or_default();
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.contains_key(tag)
    }

    /// Tags in ascending lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tags.keys().map(String::as_str)
    }

    pub fn provenance(&self, tag: &str) -> Option<&[TagOccurrence]> {
        self.tags.get(tag).map(Vec::as_slice)
    }

    pub fn generation(&self) -> Option<Generation> {
        self.generation
    }

    /// Upper bound `K * m` on the set size, when known.
    pub fn candidate_count(&self) -> Option<usize> {
        self.generation.map(|g| g.topics * g.top_words)
    }

    /// `|tags| / (K * m)`.
    pub fn dedupe_ratio(&self) -> Option<f64> {
        self.candidate_count()
            .filter(|&c| c > 0)
            .map(|c| self.len() as f64 / c as f64)
    }

    pub fn to_tag_file(&self) -> String {
        let mut out = String::new();
        for tag in self.tags.keys() {
            out.push_str(tag);
            out.push('\n');
        }
        out
    }

    /// `None` when the set has no generation parameters.
    pub fn to_sidecar(&self) -> Option<String> {
        let g = self.generation?;
        let sidecar = Sidecar {
            topics: g.topics,
            top_words: g.top_words,
            filtered: g.filtered,
            provenance: self.tags.clone(),
        };
        let mut out = serde_json::to_string_pretty(&sidecar).expect("provenance serializes");
        out.push('\n');
        Some(out)
    }

    /// `tags.txt` -> `tags.provenance.json`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("provenance.json")
    }

    /// Writes the tag file and, for generated sets, the provenance sidecar.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tag_file()).map_err(|e| Error::io(path, e))?;
        if let Some(sidecar) = self.to_sidecar() {
            let side = Self::sidecar_path(path);
            std::fs::write(&side, sidecar).map_err(|e| Error::io(&side, e))?;
        }
        Ok(())
    }

    pub fn parse_tag_file(path: &Path, text: &str) -> Result<Self> {
        let mut set = SimpleTagSet::default();
        for (idx, line) in text.lines().enumerate() {
            let tag = line.strip_suffix('\r').unwrap_or(line);
            validate_tag(tag).map_err(|m| Error::parse(path, idx + 1, m))?;
            if let Entry::Vacant(slot) = set.tags.entry(tag.to_string()) {
                slot.insert(Vec::new());
            } else {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("duplicate tag {tag:?}"),
                ));
            }
        }
        Ok(set)
    }

    /// Reads the tag file and its sidecar if one exists next to it.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut set = Self::parse_tag_file(path, &text)?;
        let side = Self::sidecar_path(path);
        if side.exists() {
            let raw = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
            let sidecar: Sidecar = serde_json::from_str(&raw).map_err(|e| Error::Json {
                path: side.clone(),
                source: e,
            })?;
            if !sidecar.provenance.keys().eq(set.tags.keys()) {
                return Err(Error::parse(
                    &side,
                    1,
                    "provenance tags differ from the tag file",
                ));
            }
            set.tags = sidecar.provenance;
            set.generation = Some(Generation {
                topics: sidecar.topics,
                top_words: sidecar.top_words,
                filtered: sidecar.filtered,
            });
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::{LdaConfig, Vocabulary};

    /// Topic 0 ranks alpha > beta > gamma > delta; topic 1 ranks
    /// gamma > beta > alpha > delta.
    pub(crate) fn two_topic_model() -> TopicModel {
        TopicModel::from_parts(
            LdaConfig {
                topics: 2,
                ..LdaConfig::new(0)
            },
            Vocabulary::from_words(["alpha", "beta", "gamma", "delta"]).unwrap(),
            vec![vec![0.4, 0.3, 0.2, 0.1], vec![0.2, 0.3, 0.4, 0.1]],
            vec!["doc".into()],
            vec![vec![0.5, 0.5]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn union_with_provenance() {
        let set = generate_tagset(&two_topic_model(), 2, &StopwordList::default()).unwrap();
        let tags: Vec<_> = set.iter().collect();
        assert_eq!(tags, ["alpha", "beta", "gamma"]);
        assert_eq!(
            set.provenance("beta").unwrap(),
            &[
                TagOccurrence {
                    topic: 0,
                    rank: 2,
                    probability: 0.3
                },
                TagOccurrence {
                    topic: 1,
                    rank: 2,
                    probability: 0.3
                },
            ]
        );
        assert_eq!(set.provenance("alpha").unwrap().len(), 1);
        assert_eq!(set.candidate_count(), Some(4));
        assert_eq!(set.dedupe_ratio(), Some(0.75));
    }

    #[test]
    fn stopwords_and_numerals_are_filtered() {
        let model = TopicModel::from_parts(
            LdaConfig {
                topics: 1,
                ..LdaConfig::new(0)
            },
            Vocabulary::from_words(["the", "2024", "grid"]).unwrap(),
            vec![vec![0.5, 0.3, 0.2]],
            vec![],
            vec![],
            vec![],
        )
        .unwrap();
        let set = generate_tagset(&model, 3, &StopwordList::default()).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), ["grid"]);
        assert_eq!(set.generation().unwrap().filtered, 2);
    }

    #[test]
    fn golden_files() {
        let set = generate_tagset(&two_topic_model(), 2, &StopwordList::default()).unwrap();
        assert_eq!(set.to_tag_file(), "alpha\nbeta\ngamma\n");
        let expected = r#"{
  "topics": 2,
  "top_words": 2,
  "filtered": 0,
  "provenance": {
    "alpha": [
      {
        "topic": 0,
        "rank": 1,
        "probability": 0.4
      }
    ],
    "beta": [
      {
        "topic": 0,
        "rank": 2,
        "probability": 0.3
      },
      {
        "topic": 1,
        "rank": 2,
        "probability": 0.3
      }
    ],
    "gamma": [
      {
        "topic": 1,
        "rank": 1,
        "probability": 0.4
      }
    ]
  }
}
"#;
        assert_eq!(set.to_sidecar().unwrap(), expected);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.txt");
        let set = generate_tagset(&two_topic_model(), 3, &StopwordList::default()).unwrap();
        set.save(&path).unwrap();
        assert!(dir.path().join("tags.provenance.json").exists());
        assert_eq!(SimpleTagSet::load(&path).unwrap(), set);
    }

    #[test]
    fn malformed_tag_file() {
        let p = Path::new("tags.txt");
        match SimpleTagSet::parse_tag_file(p, "alpha\n\nbeta\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(SimpleTagSet::parse_tag_file(p, "alpha\nalpha\n").is_err());
        assert!(SimpleTagSet::parse_tag_file(p, "two words\n").is_err());
        assert!(SimpleTagSet::parse_tag_file(p, "Upper\n").is_err());
        let ok = SimpleTagSet::parse_tag_file(p, "beta\nalpha\n").unwrap();
        assert_eq!(ok.to_tag_file(), "alpha\nbeta\n");
    }

    #[test]
    fn plain_tag_file_loads_without_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.txt");
        std::fs::write(&path, "grid\nsolar\n").unwrap();
        let set = SimpleTagSet::load(&path).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.generation().is_none());
    }
}
