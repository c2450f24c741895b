//! Synthetic corpora and paths shared by the integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simpletag::topics::KeywordCorpus;

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_simpletag")
}

/// Copies the demo corpus, subset file and config into `dir`.
pub fn copy_demo(dir: &Path) {
    for name in ["corpus.jsonl", "popular.txt", "config.json"] {
        std::fs::copy(demo_dir().join(name), dir.join(name)).unwrap();
    }
}

pub fn partition_words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:02}")).collect()
}

/// `docs` documents of `len` tokens each. Even documents draw uniformly from
/// the `north` words, odd ones from the `south` words.
pub fn planted_corpus(
    docs: usize,
    len: usize,
    words_per_partition: usize,
    seed: u64,
) -> KeywordCorpus {
    let north = partition_words("north", words_per_partition);
    let south = partition_words("south", words_per_partition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lists = (0..docs).map(|d| {
        let words = if d % 2 == 0 { &north } else { &south };
        let tokens: Vec<String> = (0..len)
            .map(|_| words[rng.random_range(0..words.len())].clone())
            .collect();
        (format!("planted-{d:03}"), tokens)
    });
    KeywordCorpus::from_token_lists(lists).unwrap()
}

const THEMES: [&[&str]; 6] = [
    &[
        "quantum",
        "qubit",
        "entanglement",
        "error",
        "correction",
        "superconducting",
        "photonic",
        "annealing",
        "cryogenic",
        "coherence",
    ],
    &[
        "cloud",
        "security",
        "identity",
        "encryption",
        "zero",
        "trust",
        "firewall",
        "breach",
        "compliance",
        "workload",
    ],
    &[
        "solar",
        "battery",
        "storage",
        "grid",
        "wind",
        "turbine",
        "hydrogen",
        "emissions",
        "carbon",
        "utility",
    ],
    &[
        "clinical",
        "patient",
        "hospital",
        "diagnostic",
        "imaging",
        "telehealth",
        "genomics",
        "therapy",
        "pharmacy",
        "trial",
    ],
    &[
        "logistics",
        "warehouse",
        "freight",
        "inventory",
        "supplier",
        "procurement",
        "shipping",
        "port",
        "tariff",
        "forecasting",
    ],
    &[
        "payments",
        "banking",
        "lending",
        "fraud",
        "ledger",
        "blockchain",
        "remittance",
        "credit",
        "wallet",
        "settlement",
    ],
];

const FILLER: [&str; 12] = [
    "market",
    "growth",
    "adoption",
    "vendors",
    "enterprise",
    "strategy",
    "deployment",
    "investment",
    "outlook",
    "analysis",
    "operations",
    "regional",
];

/// A JSON Lines corpus of `n` report-like documents.
pub fn synthetic_corpus_jsonl(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..n {
        let theme = THEMES[i % THEMES.len()];
        let sentence = |len: usize, rng: &mut ChaCha8Rng| {
            let words: Vec<&str> = (0..len)
                .map(|j| {
                    if j % 3 == 2 {
                        FILLER[rng.random_range(0..FILLER.len())]
                    } else {
                        theme[rng.random_range(0..theme.len())]
                    }
                })
                .collect();
            words.join(" ")
        };
        let title = sentence(5, &mut rng);
        let content = (0..6)
            .map(|_| sentence(9, &mut rng))
            .collect::<Vec<_>>()
            .join(". ");
        let doc =
            serde_json::json!({ "id": format!("s{i:04}"), "title": title, "content": content });
        writeln!(out, "{doc}").unwrap();
    }
    out
}
