//! Bundled resource files.

/// English stop-word list, one word per line.
pub const STOPWORDS_EN: &str = include_str!("../resources/stopwords_en.txt");

/// WordNet 3.0 derived synonym table: `word<TAB>syn syn ...`.
pub const THESAURUS: &str = include_str!("../resources/thesaurus.tsv");

/// Zero-shot class prompts for SST-2, SNIPS and TREC plus the default
/// paraphrase template, as a JSON array of prompt templates.
pub const PROMPT_CATALOG: &str = include_str!("../resources/prompt_catalog.json");
