//! Derive a compact set of unigram corpus tags from per-document keyword
//! extraction and LDA topic modeling, attach them to every document, and
//! report how many documents end up under-, over- or sufficiently tagged.
//!
//! The stages are:
//!
//! 1. [`extract`]: complex tags (key phrases with confidences) per document.
//! 2. [`topics`]: LDA by collapsed Gibbs sampling over the tokenized tags.
//! 3. [`tagset`]: union of every topic's top-`m` words.
//! 4. [`apply`]: intersect each document's tokenized complex tags with the set.
//! 5. [`report`]: classification, histogram and percentages.
//!
//! [`pipeline`] runs them end to end with file outputs between stages.

pub mod apply;
pub mod config;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod pipeline;
pub mod report;
pub mod tagset;
pub mod topics;

pub use error::{Error, Result};
