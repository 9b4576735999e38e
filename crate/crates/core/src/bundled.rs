//! Data files compiled into the crate so the pipeline runs without any
//! external inputs.

/// The five 40-verb target inventories.
pub const TARGET_VERBS: &str = include_str!("../data/lexicon/target_verbs.tsv");
/// Animate and inanimate nouns used by the sample premise bank.
pub const TARGET_NOUNS: &str = include_str!("../data/lexicon/target_nouns.tsv");
/// A small filler inventory, disjoint from the target vocabulary.
pub const FILLERS_SAMPLE: &str = include_str!("../data/lexicon/fillers_sample.tsv");
/// 80 plausible premises for each of the eight constructions.
pub const SAMPLE_BANK: &str = include_str!("../data/premises/sample_bank.jsonl");

pub const LEXICON_SOURCES: [(&str, &str); 3] = [
    ("target_verbs.tsv", TARGET_VERBS),
    ("target_nouns.tsv", TARGET_NOUNS),
    ("fillers_sample.tsv", FILLERS_SAMPLE),
];
