//! LDA over per-document keyword bags.

mod bags;
mod lda;
mod model;

pub use bags::{build_keyword_documents, KeywordBag, KeywordCorpus, Vocabulary};
pub use lda::{fit, fit_with_observer, GibbsState, LdaConfig, RNG_ALGORITHM, UNIFORM_ALGORITHM};
pub use model::{Perplexity, TopicModel};
