//! Brute-force reference implementations and random case generators shared
//! by the integration tests and the acceptance target.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::Deserialize;
use synthaug::augment::{
    eda_augment, random_deletion, random_insertion, random_swap, synonym_replacement, EdaParams, Thesaurus,
};
use synthaug::corpus::LabeledExample;
use synthaug::evalbench::{Params, Problem};
use synthaug::rng::SeededRng;
use synthaug::textkit::{SparseVector, Stoplist, TokenList};

const CONTENT: [&str; 15] = [
    "film", "plot", "actor", "music", "score", "scene", "story", "drama", "comedy", "script", "camera", "light",
    "sound", "color", "voice",
];
const STOP: [&str; 8] = ["the", "a", "is", "and", "of", "it", "was", "not"];

pub struct MicroCorpus {
    pub train: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
    pub generated: Vec<LabeledExample>,
}

fn micro_doc(rng: &mut SeededRng) -> String {
    let len = 1 + rng.below(12);
    let words: Vec<String> = (0..len)
        .map(|_| {
            let mut w = if rng.below(3) == 0 {
                STOP[rng.below(STOP.len())].to_string()
            } else {
                CONTENT[rng.below(CONTENT.len())].to_string()
            };
            if rng.below(5) == 0 {
                w = w.to_uppercase();
            }
            if rng.below(10) == 0 {
                w.push(',');
            }
            w
        })
        .collect();
    words.join(" ")
}

fn micro_set(rng: &mut SeededRng, prefix: &str) -> Vec<LabeledExample> {
    let n = 1 + rng.below(10);
    (0..n)
        .map(|i| {
            let label = if rng.below(2) == 0 { "pos" } else { "neg" };
            LabeledExample::new(format!("{prefix}{i}"), micro_doc(rng), label).unwrap()
        })
        .collect()
}

/// Up to 10 documents per set, up to 12 words per document.
pub fn micro_corpus(seed: u64) -> MicroCorpus {
    let mut rng = SeededRng::new(seed);
    MicroCorpus {
        train: micro_set(&mut rng, "tr"),
        test: micro_set(&mut rng, "te"),
        generated: micro_set(&mut rng, "g"),
    }
}

fn words(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in lower.chars() {
        if ch.is_alphanumeric() {
            cur.push(ch);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn content_tokens(text: &str, stop: &Stoplist) -> Vec<String> {
    words(text).into_iter().filter(|w| !stop.contains(w)).collect()
}

fn overlap(a: &str, b: &str, stop: &Stoplist) -> f64 {
    let sa: BTreeSet<String> = content_tokens(a, stop).into_iter().collect();
    let sb: BTreeSet<String> = content_tokens(b, stop).into_iter().collect();
    if sa.is_empty() || sb.is_empty() {
        return 0.0;
    }
    sa.intersection(&sb).count() as f64 / sa.len().max(sb.len()) as f64
}

fn tfidf_vectors(docs: &[Vec<String>]) -> Vec<HashMap<String, f64>> {
    let n = docs.len() as f64;
    let mut df: HashMap<&str, f64> = HashMap::new();
    for d in docs {
        let uniq: BTreeSet<&str> = d.iter().map(String::as_str).collect();
        for w in uniq {
            *df.entry(w).or_default() += 1.0;
        }
    }
    docs.iter()
        .map(|d| {
            let mut v: HashMap<String, f64> = HashMap::new();
            for w in d {
                *v.entry(w.clone()).or_default() += 1.0;
            }
            for (w, x) in v.iter_mut() {
                *x *= ((1.0 + n) / (1.0 + df[w.as_str()])).ln() + 1.0;
            }
            let norm = v.values().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.values_mut().for_each(|x| *x /= norm);
            }
            v
        })
        .collect()
}

fn sparse_cos(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    a.iter().map(|(w, x)| x * b.get(w).copied().unwrap_or(0.0)).sum()
}

fn dense_cos(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub scores: Vec<f64>,
    pub mean: f64,
}

fn double_loop(n_gen: usize, n_ref: usize, sim: impl Fn(usize, usize) -> f64) -> OracleReport {
    let mut scores = Vec::with_capacity(n_gen);
    for g in 0..n_gen {
        let mut best = f64::NEG_INFINITY;
        for r in 0..n_ref {
            best = best.max(sim(g, r));
        }
        scores.push(best);
    }
    let mean = scores.iter().sum::<f64>() / n_gen as f64;
    OracleReport { scores, mean }
}

/// Reports keyed by (`pair`, `metric`) using the CLI's short names.
pub fn oracle_audit(
    corpus: &MicroCorpus,
    stop: &Stoplist,
    embed: &dyn Fn(&str) -> Vec<f64>,
) -> BTreeMap<(&'static str, &'static str), OracleReport> {
    let sets: [&[LabeledExample]; 3] = [&corpus.generated, &corpus.train, &corpus.test];
    let texts: Vec<Vec<&str>> = sets.iter().map(|s| s.iter().map(|e| e.text.as_str()).collect()).collect();

    // TF-IDF is fit on train, test and generated together.
    let mut all_docs = Vec::new();
    for &set in &[1usize, 2, 0] {
        all_docs.extend(texts[set].iter().map(|t| content_tokens(t, stop)));
    }
    let all_vecs = tfidf_vectors(&all_docs);
    let (n_tr, n_te) = (texts[1].len(), texts[2].len());
    let tfidf: [Vec<HashMap<String, f64>>; 3] = [
        all_vecs[n_tr + n_te..].to_vec(),
        all_vecs[..n_tr].to_vec(),
        all_vecs[n_tr..n_tr + n_te].to_vec(),
    ];
    let emb: Vec<Vec<Vec<f64>>> = texts.iter().map(|s| s.iter().map(|t| embed(t)).collect()).collect();

    let mut out = BTreeMap::new();
    for (pair, g, r) in [("generated-train", 0, 1), ("generated-test", 0, 2), ("train-test", 1, 2)] {
        let (ng, nr) = (texts[g].len(), texts[r].len());
        out.insert((pair, "overlap"), double_loop(ng, nr, |i, j| overlap(texts[g][i], texts[r][j], stop)));
        out.insert((pair, "tfidf"), double_loop(ng, nr, |i, j| sparse_cos(&tfidf[g][i], &tfidf[r][j])));
        out.insert((pair, "embed"), double_loop(ng, nr, |i, j| dense_cos(&emb[g][i], &emb[r][j])));
    }
    out
}

pub fn random_problem(seed: u64) -> (Problem, Params, f64) {
    let mut rng = SeededRng::new(seed);
    let classes = 2 + rng.below(3);
    let dim = 1 + rng.below(6);
    let n = 1 + rng.below(8);
    let xs: Vec<SparseVector> = (0..n)
        .map(|_| {
            let mut pairs = Vec::new();
            for i in 0..dim {
                if rng.below(2) == 0 {
                    pairs.push((i, rng.unit_f64() * 2.0 - 1.0));
                }
            }
            SparseVector::from_pairs(pairs)
        })
        .collect();
    let ys = (0..n).map(|_| rng.below(classes)).collect();
    let mut params = Params::zeros(classes, dim);
    params.weights.iter_mut().for_each(|w| *w = rng.unit_f64() * 2.0 - 1.0);
    params.bias.iter_mut().for_each(|b| *b = rng.unit_f64() - 0.5);
    let l2 = if rng.below(2) == 0 { 0.0 } else { 0.01 };
    (Problem { xs, ys, classes, dim }, params, l2)
}

/// Largest relative gap between the analytic gradient and central differences.
pub fn max_gradient_error(problem: &Problem, params: &Params, l2: f64) -> f64 {
    const H: f64 = 1e-5;
    let analytic = problem.gradient(params, l2);
    let numeric = |get: &dyn Fn(&mut Params) -> &mut f64| {
        let mut plus = params.clone();
        *get(&mut plus) += H;
        let mut minus = params.clone();
        *get(&mut minus) -= H;
        (problem.loss(&plus, l2) - problem.loss(&minus, l2)) / (2.0 * H)
    };
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-6);
    let mut worst = 0.0f64;
    for i in 0..params.weights.len() {
        worst = worst.max(rel(analytic.weights[i], numeric(&|p| &mut p.weights[i])));
    }
    for c in 0..params.bias.len() {
        worst = worst.max(rel(analytic.bias[c], numeric(&|p| &mut p.bias[c])));
    }
    worst
}

const EDA_WORDS: [&str; 20] = [
    "good", "bad", "movie", "film", "great", "happy", "story", "fast", "the", "a", "is", "and", "zorblat", "qux",
    "beautiful", "boring", "actor", "music", "small", "very",
];

pub fn eda_tokens(rng: &mut SeededRng) -> TokenList {
    let len = rng.below(16);
    TokenList::from_tokens((0..len).map(|_| EDA_WORDS[rng.below(EDA_WORDS.len())].to_string()).collect())
}

fn is_subsequence(small: &[String], big: &[String]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.any(|b| b == s))
}

/// Checks every operation's structural invariants on one random case.
pub fn check_eda_case(seed: u64, thesaurus: &Thesaurus, stop: &Stoplist) -> Result<(), String> {
    let mut rng = SeededRng::new(seed);
    let tokens = eda_tokens(&mut rng);
    let n = 1 + rng.below(4);
    let p = [0.0, 0.1, 0.5, 1.0][rng.below(4)];
    let src = tokens.tokens();
    let ctx = || format!("seed {seed}: {src:?} n={n} p={p}");

    let swapped = random_swap(&tokens, n, &mut SeededRng::new(seed ^ 1));
    let (mut a, mut b) = (src.to_vec(), swapped.tokens().to_vec());
    a.sort();
    b.sort();
    if a != b {
        return Err(format!("swap changed the multiset: {}", ctx()));
    }

    let deleted = random_deletion(&tokens, p, &mut SeededRng::new(seed ^ 2));
    if !is_subsequence(deleted.tokens(), src) {
        return Err(format!("deletion is not a subsequence: {}", ctx()));
    }
    if !src.is_empty() && deleted.is_empty() {
        return Err(format!("deletion emptied the sentence: {}", ctx()));
    }
    if p == 1.0 && !src.is_empty() && deleted.len() != 1 {
        return Err(format!("p = 1 must keep exactly one token: {}", ctx()));
    }
    if p == 0.0 && deleted != tokens {
        return Err(format!("p = 0 must keep every token: {}", ctx()));
    }

    let replaced = synonym_replacement(&tokens, n, thesaurus, stop, &mut SeededRng::new(seed ^ 3));
    if replaced.len() != src.len() {
        return Err(format!("synonym replacement changed length: {}", ctx()));
    }
    let mut changed = 0;
    for (orig, new) in src.iter().zip(replaced.tokens()) {
        if orig != new {
            changed += 1;
            if stop.contains(orig) || !thesaurus.synonyms(orig).contains(new) {
                return Err(format!("`{orig}` replaced by non-synonym `{new}`: {}", ctx()));
            }
        }
    }
    if changed > n {
        return Err(format!("more than n replacements: {}", ctx()));
    }

    let inserted = random_insertion(&tokens, n, thesaurus, stop, &mut SeededRng::new(seed ^ 4));
    let any_candidate = src.iter().any(|w| !stop.contains(w) && !thesaurus.synonyms(w).is_empty());
    let expected = if any_candidate { src.len() + n } else { src.len() };
    if inserted.len() != expected {
        return Err(format!("insertion length {} != {expected}: {}", inserted.len(), ctx()));
    }
    if !is_subsequence(src, inserted.tokens()) {
        return Err(format!("insertion lost original tokens: {}", ctx()));
    }

    if !src.is_empty() {
        let ex = LabeledExample::new(format!("case{seed}"), tokens.join(), "some-label").unwrap();
        let out = eda_augment(&ex, &EdaParams::new(p.min(0.5), seed).unwrap(), 4, thesaurus, stop);
        if out.len() != 4 || out.iter().any(|e| e.label != ex.label) {
            return Err(format!("eda_augment count or label changed: {}", ctx()));
        }
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
pub struct EdaVector {
    pub id: String,
    pub text: String,
    pub alpha: f64,
    pub seed: u64,
    pub k: usize,
    pub outputs: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct EdaVectorFile {
    cases: Vec<EdaVector>,
}

pub fn load_eda_vectors(path: &Path) -> Vec<EdaVector> {
    let text = std::fs::read_to_string(path).unwrap();
    serde_json::from_str::<EdaVectorFile>(&text).unwrap().cases
}

/// Cases whose output differs from the frozen vectors.
pub fn eda_vector_mismatches(cases: &[EdaVector], thesaurus: &Thesaurus, stop: &Stoplist) -> Vec<String> {
    cases
        .iter()
        .filter_map(|c| {
            let ex = LabeledExample::new(c.id.clone(), c.text.clone(), "x").unwrap();
            let got: Vec<String> = eda_augment(&ex, &EdaParams::new(c.alpha, c.seed).unwrap(), c.k, thesaurus, stop)
                .into_iter()
                .map(|e| e.text)
                .collect();
            (got != c.outputs).then(|| format!("{} alpha={} seed={}: {got:?} != {:?}", c.id, c.alpha, c.seed, c.outputs))
        })
        .collect()
}

/// Live settings for tests against the mock server: no rate limit, millisecond backoff.
pub fn mock_config(
    base_url: &str,
    mode: synthaug::providers::ReplayMode,
    cassette: Option<std::path::PathBuf>,
) -> synthaug::providers::ProviderConfig {
    synthaug::providers::ProviderConfig {
        mode,
        cassette,
        api_key: Some("test-key".into()),
        base_url: base_url.to_string(),
        requests_per_second: 0.0,
        retry: synthaug::providers::RetryPolicy {
            max_attempts: 5,
            base_delay_ms: 1,
            factor: 2.0,
        },
        timeout_secs: 10,
        ..Default::default()
    }
}

/// Mock fixture records as a bundle, without a round trip through a file.
pub fn fixture_bundle(task: &str, sizes: synthaug_mock::fixtures::Sizes, seed: u64) -> synthaug::DatasetBundle {
    let (mut train, mut dev, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for r in synthaug_mock::fixtures::generate(task, sizes, seed) {
        let e = LabeledExample::new(r.id, r.text, r.label).unwrap();
        match r.split.as_str() {
            "train" => train.push(e),
            "dev" => dev.push(e),
            _ => test.push(e),
        }
    }
    synthaug::DatasetBundle::new(task, train, dev, test).unwrap()
}
