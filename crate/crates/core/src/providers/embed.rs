use std::sync::Arc;

use rayon::prelude::*;

use super::{Provider, ProviderError, Result};
use crate::rng::fnv1a64;
use crate::textkit::{tokenize, Stoplist};

pub const HASH_EMBEDDING_DIM: usize = 256;

/// Anything that maps texts to equal-length vectors.
pub trait Embedder: Send + Sync {
    fn name(&self) -> &str;
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>>;
}

/// Offline stand-in embedder: hashed bag of content words, L2-normalised.
///
/// Each non-stop-word token adds 1 to bucket `fnv1a64(token) % 256`. The
/// vectors only encode shared vocabulary; they carry no semantics and exist
/// so pipelines can run without an embedding service.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    stoplist: Stoplist,
    dim: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder {
            stoplist: Stoplist::standard(),
            dim: HASH_EMBEDDING_DIM,
        }
    }
}

impl HashEmbedder {
    pub fn new(stoplist: Stoplist) -> Self {
        HashEmbedder {
            stoplist,
            dim: HASH_EMBEDDING_DIM,
        }
    }

    pub fn bucket(&self, word: &str) -> usize {
        (fnv1a64(word.as_bytes()) % self.dim as u64) as usize
    }

    pub fn embed_one(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for t in tokenize(text).tokens() {
            if !self.stoplist.contains(t) {
                v[self.bucket(t)] += 1.0;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

impl Embedder for HashEmbedder {
    fn name(&self) -> &str {
        "hash"
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }
}

/// [`HashEmbedder`] with the bundled stop-word list.
pub fn builtin_hash_embedder(texts: &[String]) -> Vec<Vec<f64>> {
    let e = HashEmbedder::default();
    texts.iter().map(|t| e.embed_one(t)).collect()
}

/// Embeds through a [`Provider`] in fixed-size batches.
///
/// Batch boundaries depend only on input order and `batch_size`, so a
/// replayed run issues exactly the recorded requests. Up to
/// `max_concurrent` batches are in flight at once.
pub struct ProviderEmbedder {
    provider: Arc<Provider>,
    pub batch_size: usize,
    pub max_concurrent: usize,
}

impl ProviderEmbedder {
    pub fn new(provider: Arc<Provider>) -> Self {
        ProviderEmbedder {
            provider,
            batch_size: 64,
            max_concurrent: 4,
        }
    }
}

impl Embedder for ProviderEmbedder {
    fn name(&self) -> &str {
        "provider"
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(ProviderError::InvalidRequest("empty embedding batch".into()));
        }
        let batches: Vec<&[String]> = texts.chunks(self.batch_size.max(1)).collect();
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(texts.len());
        for wave in batches.chunks(self.max_concurrent.max(1)) {
            let results: Vec<Result<Vec<Vec<f64>>>> = wave.par_iter().map(|b| self.provider.embed(b)).collect();
            for r in results {
                match r {
                    Ok(vectors) => {
                        if let (Some(first), Some(v)) = (out.first(), vectors.first()) {
                            if first.len() != v.len() {
                                return Err(ProviderError::DimensionMismatch {
                                    expected: first.len(),
                                    got: v.len(),
                                    index: out.len(),
                                });
                            }
                        }
                        out.extend(vectors);
                    }
                    Err(source) => {
                        return Err(ProviderError::Partial {
                            completed: out.len(),
                            total: texts.len(),
                            source: Box::new(source),
                        })
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn identical_texts_have_cosine_one() {
        let v = builtin_hash_embedder(&["play some jazz".into(), "play some jazz".into()]);
        assert_eq!(v[0].len(), HASH_EMBEDDING_DIM);
        assert!((cos(&v[0], &v[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permuted_words_give_identical_vectors() {
        let v = builtin_hash_embedder(&["rainy weather tomorrow".into(), "tomorrow weather rainy".into()]);
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn disjoint_content_words_are_orthogonal() {
        let e = HashEmbedder::default();
        let (a, b) = ("jazz playlist", "weather london");
        let mut buckets_a: Vec<usize> = ["jazz", "playlist"].iter().map(|w| e.bucket(w)).collect();
        let buckets_b: Vec<usize> = ["weather", "london"].iter().map(|w| e.bucket(w)).collect();
        buckets_a.retain(|x| buckets_b.contains(x));
        assert!(buckets_a.is_empty(), "fixture words collide");
        assert_eq!(cos(&e.embed_one(a), &e.embed_one(b)), 0.0);
    }

    #[test]
    fn all_stopword_text_is_zero_vector() {
        let v = HashEmbedder::default().embed_one("what is the");
        assert!(v.iter().all(|&x| x == 0.0));
    }
}
