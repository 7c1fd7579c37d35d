use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AugmentError, Result};
use crate::corpus::{Generation, LabeledExample, Provenance};
use crate::resources;
use crate::rng::{derive_seed, fnv1a64, SeededRng};
use crate::textkit::{tokenize, Stoplist, TokenList};

/// Word to synonym-list table.
///
/// File format: one `word<TAB>syn syn ...` entry per line, `#` comments.
#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    entries: HashMap<String, Vec<String>>,
}

impl Thesaurus {
    pub fn parse(content: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, syns) = line
                .split_once('\t')
                .ok_or_else(|| AugmentError::Thesaurus(format!("line {}: expected `word<TAB>synonyms`", i + 1)))?;
            let word = word.trim().to_lowercase();
            let syns: Vec<String> = syns
                .split_whitespace()
                .map(str::to_lowercase)
                .filter(|s| *s != word)
                .collect();
            if !syns.is_empty() {
                entries.insert(word, syns);
            }
        }
        Ok(Thesaurus { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|source| AugmentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&content)
    }

    /// The bundled WordNet-derived table.
    pub fn standard() -> Self {
        Self::parse(resources::THESAURUS).expect("bundled thesaurus parses")
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a [&'a str])>) -> Self {
        let entries = pairs
            .into_iter()
            .map(|(w, s)| (w.to_string(), s.iter().map(|x| x.to_string()).collect()))
            .collect();
        Thesaurus { entries }
    }

    pub fn synonyms(&self, word: &str) -> &[String] {
        self.entries.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdaParams {
    pub alpha: f64,
    pub seed: u64,
}

impl EdaParams {
    pub fn new(alpha: f64, seed: u64) -> Result<Self> {
        let p = EdaParams { alpha, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(AugmentError::InvalidParams(format!("alpha must be in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdaOp {
    SynonymReplacement,
    RandomInsertion,
    RandomSwap,
    RandomDeletion,
}

impl EdaOp {
    /// Round-robin order used by [`eda_augment`].
    pub const ALL: [EdaOp; 4] = [
        EdaOp::SynonymReplacement,
        EdaOp::RandomInsertion,
        EdaOp::RandomSwap,
        EdaOp::RandomDeletion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdaOp::SynonymReplacement => "synonym-replacement",
            EdaOp::RandomInsertion => "random-insertion",
            EdaOp::RandomSwap => "random-swap",
            EdaOp::RandomDeletion => "random-deletion",
        }
    }
}

fn has_synonyms(word: &str, thesaurus: &Thesaurus, stoplist: &Stoplist) -> bool {
    !stoplist.contains(word) && !thesaurus.synonyms(word).is_empty()
}

/// Replaces up to `n` distinct content-word positions that have synonyms.
pub fn synonym_replacement(
    tokens: &TokenList,
    n: usize,
    thesaurus: &Thesaurus,
    stoplist: &Stoplist,
    rng: &mut SeededRng,
) -> TokenList {
    let mut out = tokens.tokens().to_vec();
    let candidates: Vec<usize> = (0..out.len())
        .filter(|&i| has_synonyms(&out[i], thesaurus, stoplist))
        .collect();
    if n == 0 || candidates.is_empty() {
        return TokenList::from_tokens(out);
    }
    for pick in rng.sample_indices(candidates.len(), n) {
        let pos = candidates[pick];
        let syns = thesaurus.synonyms(&out[pos]);
        out[pos] = syns[rng.below(syns.len())].clone();
    }
    TokenList::from_tokens(out)
}

/// Inserts a synonym of a random content word at a random position, `n` times.
/// Stops early once no token has synonyms.
pub fn random_insertion(
    tokens: &TokenList,
    n: usize,
    thesaurus: &Thesaurus,
    stoplist: &Stoplist,
    rng: &mut SeededRng,
) -> TokenList {
    let mut out = tokens.tokens().to_vec();
    for _ in 0..n {
        let candidates: Vec<usize> = (0..out.len())
            .filter(|&i| has_synonyms(&out[i], thesaurus, stoplist))
            .collect();
        if candidates.is_empty() {
            break;
        }
        let word = &out[candidates[rng.below(candidates.len())]];
        let syns = thesaurus.synonyms(word);
        let syn = syns[rng.below(syns.len())].clone();
        let at = rng.below(out.len() + 1);
        out.insert(at, syn);
    }
    TokenList::from_tokens(out)
}

/// Swaps two distinct random positions, `n` times.
pub fn random_swap(tokens: &TokenList, n: usize, rng: &mut SeededRng) -> TokenList {
    let mut out = tokens.tokens().to_vec();
    if out.len() < 2 {
        return TokenList::from_tokens(out);
    }
    for _ in 0..n {
        let i = rng.below(out.len());
        let mut j = rng.below(out.len() - 1);
        if j >= i {
            j += 1;
        }
        out.swap(i, j);
    }
    TokenList::from_tokens(out)
}

/// Drops each token with probability `p`; keeps one random token if all go.
pub fn random_deletion(tokens: &TokenList, p: f64, rng: &mut SeededRng) -> TokenList {
    let src = tokens.tokens();
    if src.is_empty() {
        return tokens.clone();
    }
    let kept: Vec<String> = src.iter().filter(|_| rng.unit_f64() >= p).cloned().collect();
    if kept.is_empty() {
        return TokenList::from_tokens(vec![src[rng.below(src.len())].clone()]);
    }
    TokenList::from_tokens(kept)
}

/// `k` perturbed copies of `example`, cycling through the four operations.
///
/// The generator is seeded from `params.seed` and the example id, so the
/// output for one example does not depend on what else is augmented.
pub fn eda_augment(
    example: &LabeledExample,
    params: &EdaParams,
    k: usize,
    thesaurus: &Thesaurus,
    stoplist: &Stoplist,
) -> Vec<LabeledExample> {
    let tokens = tokenize(&example.text);
    let mut rng = SeededRng::new(derive_seed(params.seed, fnv1a64(example.id.as_bytes())));
    let n = ((params.alpha * tokens.len() as f64).round() as usize).max(1);
    (0..k)
        .map(|i| {
            let op = EdaOp::ALL[i % EdaOp::ALL.len()];
            let out = match op {
                EdaOp::SynonymReplacement => synonym_replacement(&tokens, n, thesaurus, stoplist, &mut rng),
                EdaOp::RandomInsertion => random_insertion(&tokens, n, thesaurus, stoplist, &mut rng),
                EdaOp::RandomSwap => random_swap(&tokens, n, &mut rng),
                EdaOp::RandomDeletion => random_deletion(&tokens, params.alpha, &mut rng),
            };
            let mut flags = Vec::new();
            if out == tokens {
                flags.push("unchanged".to_string());
            }
            // Text with no word characters tokenizes to nothing; keep the source text.
            let text = if out.is_empty() { example.text.clone() } else { out.join() };
            LabeledExample {
                id: format!("{}-eda{}", example.id, i),
                text,
                label: example.label.clone(),
                provenance: Provenance::Generated(Generation {
                    method: "eda".into(),
                    seed: params.seed,
                    prompt_id: op.name().into(),
                    source_id: Some(example.id.clone()),
                    flags,
                }),
            }
        })
        .collect()
}
