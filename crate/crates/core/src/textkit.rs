//! Tokenization, stop-word filtering and TF-IDF vectors.
//!
//! Weighting is fixed as follows so audit numbers are reproducible:
//!
//! * `idf(w) = ln((1 + N) / (1 + df(w))) + 1` over `N` fitted documents,
//! * raw term counts as `tf`,
//! * vectors L2-normalised after weighting.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resources;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("cannot fit TF-IDF on an empty corpus")]
    EmptyCorpus,
    #[error("cannot fit TF-IDF: every document is empty")]
    AllDocumentsEmpty,
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Lowercased word tokens. No token is empty or contains whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TokenList(Vec<String>);

impl TokenList {
    /// Wraps already-normalised tokens.
    ///
    /// Panics in debug builds if a token is empty or contains whitespace.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        TokenList(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }
}

/// Lowercases and splits on every maximal run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> TokenList {
    // Lowercase before splitting: some lowercase mappings emit combining marks.
    TokenList(
        text.to_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    /// Parses one word per line; `#` starts a comment, blank lines are skipped.
    pub fn parse(content: &str) -> Self {
        let words = content
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Stoplist { words }
    }

    pub fn from_file(path: &Path) -> Result<Self, TextError> {
        std::fs::read_to_string(path)
            .map(|s| Self::parse(&s))
            .map_err(|source| TextError::Io {
                path: path.to_path_buf(),
                source,
            })
    }

    /// The bundled 179-word English list.
    pub fn standard() -> Self {
        Self::parse(resources::STOPWORDS_EN)
    }

    pub fn empty() -> Self {
        Stoplist { words: HashSet::new() }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Unique tokens that are not stop words.
pub fn content_words(tokens: &TokenList, stoplist: &Stoplist) -> BTreeSet<String> {
    tokens
        .tokens()
        .iter()
        .filter(|t| !stoplist.contains(t))
        .cloned()
        .collect()
}

/// Drops stop words but keeps order and repeats.
pub fn remove_stopwords(tokens: &TokenList, stoplist: &Stoplist) -> TokenList {
    TokenList(
        tokens
            .tokens()
            .iter()
            .filter(|t| !stoplist.contains(t))
            .cloned()
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    /// Word to column index; indices follow the sorted word order.
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub doc_count: usize,
}

pub fn fit_tfidf(corpus: &[TokenList]) -> Result<TfIdfModel, TextError> {
    if corpus.is_empty() {
        return Err(TextError::EmptyCorpus);
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        let unique: HashSet<&str> = doc.tokens().iter().map(String::as_str).collect();
        for w in unique {
            *df.entry(w).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(TextError::AllDocumentsEmpty);
    }
    let n = corpus.len() as f64;
    let mut words: Vec<(&str, usize)> = df.into_iter().collect();
    words.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::with_capacity(words.len());
    for (i, (w, d)) in words.into_iter().enumerate() {
        vocabulary.insert(w.to_string(), i);
        idf.push(((1.0 + n) / (1.0 + d as f64)).ln() + 1.0);
    }
    Ok(TfIdfModel {
        vocabulary,
        idf,
        doc_count: corpus.len(),
    })
}

impl TfIdfModel {
    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    pub fn idf_of(&self, word: &str) -> Option<f64> {
        self.vocabulary.get(word).map(|&i| self.idf[i])
    }

    /// Raw count times idf for in-vocabulary words, then L2-normalised.
    pub fn transform(&self, tokens: &TokenList) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens.tokens() {
            if let Some(&col) = self.vocabulary.get(t) {
                *counts.entry(col).or_default() += 1.0;
            }
        }
        let entries = counts.into_iter().map(|(col, tf)| (col, tf * self.idf[col])).collect();
        SparseVector::from_sorted(entries).normalized()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }
}

/// Sparse non-negative vector with sorted column indices and a cached norm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    norm: f64,
}

impl SparseVector {
    /// Builds from arbitrary `(column, weight)` pairs; duplicates are summed and zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (c, w) in pairs {
            *acc.entry(c).or_default() += w;
        }
        Self::from_sorted(acc.into_iter().collect())
    }

    fn from_sorted(entries: Vec<(usize, f64)>) -> Self {
        let entries: Vec<(usize, f64)> = entries.into_iter().filter(|&(_, w)| w != 0.0).collect();
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        SparseVector { entries, norm }
    }

    pub fn normalized(self) -> Self {
        if self.norm == 0.0 {
            return self;
        }
        let norm = self.norm;
        Self::from_sorted(self.entries.into_iter().map(|(c, w)| (c, w / norm)).collect())
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        let mut sum = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }
}

/// Cosine similarity clamped to `[0, 1]`; zero if either vector is zero.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> f64 {
    if u.norm == 0.0 || v.norm == 0.0 {
        return 0.0;
    }
    (u.dot(v) / (u.norm * v.norm)).clamp(0.0, 1.0)
}
