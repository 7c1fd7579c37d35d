//! Contamination audit between generated data and a reference set.
//!
//! Every generated example is compared with every reference example; its
//! best score is kept (ties go to the lowest reference index) and the
//! dataset score is the mean of these maxima. Three metrics are available:
//!
//! * `WordOverlap`: shared unique content words divided by the size of the
//!   larger content-word set (0 when either set is empty),
//! * `TfIdfCosine`: cosine of stop-word-filtered TF-IDF vectors,
//! * `EmbeddingCosine`: cosine of sentence embeddings, negatives clamped to 0.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DatasetBundle, LabeledExample};
use crate::providers::{Embedder, ProviderError};
use crate::textkit::{content_words, cosine, fit_tfidf, remove_stopwords, tokenize, SparseVector, Stoplist, TextError, TfIdfModel};

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("generated set is empty")]
    EmptyGenerated,
    #[error("reference set is empty")]
    EmptyReference,
    #[error("embedding cosine requested but no embedder was supplied")]
    MissingEmbedder,
    #[error("embedding the {set} set failed: {source}")]
    Provider {
        set: String,
        #[source]
        source: ProviderError,
    },
    #[error("overlap statistics need a word-overlap report, got {0}")]
    WrongMetric(MetricKind),
    #[error("overlap statistics need a non-empty report")]
    EmptyReport,
    #[error("unknown metric `{0}` (expected embed, tfidf or overlap)")]
    UnknownMetric(String),
    #[error(transparent)]
    Text(#[from] TextError),
}

pub type Result<T> = std::result::Result<T, SimilarityError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    EmbeddingCosine,
    TfIdfCosine,
    WordOverlap,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::EmbeddingCosine, MetricKind::TfIdfCosine, MetricKind::WordOverlap];

    pub fn short_name(self) -> &'static str {
        match self {
            MetricKind::EmbeddingCosine => "embed",
            MetricKind::TfIdfCosine => "tfidf",
            MetricKind::WordOverlap => "overlap",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            MetricKind::EmbeddingCosine => "Sentence Embedding",
            MetricKind::TfIdfCosine => "TF-IDF",
            MetricKind::WordOverlap => "Word Overlap",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for MetricKind {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "embed" | "embedding" | "embedding_cosine" => Ok(MetricKind::EmbeddingCosine),
            "tfidf" | "tf-idf" | "tfidf_cosine" => Ok(MetricKind::TfIdfCosine),
            "overlap" | "word_overlap" => Ok(MetricKind::WordOverlap),
            other => Err(SimilarityError::UnknownMetric(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxMatch {
    pub generated_id: String,
    pub reference_id: String,
    pub score: f64,
    /// Unclamped embedding cosine; only set for `EmbeddingCosine`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub metric: MetricKind,
    pub per_example_max: Vec<MaxMatch>,
    pub dataset_mean: f64,
}

impl SimilarityReport {
    pub fn n(&self) -> usize {
        self.per_example_max.len()
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_example_max.iter().map(|m| m.score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapStats {
    /// Fraction of examples scoring strictly above 2/3.
    pub frac_above_two_thirds: f64,
    pub max_percent: f64,
    /// Examples whose score is within 1e-9 of the maximum.
    pub count_at_max: usize,
}

/// Word overlap of two unique content-word sets.
pub fn overlap_of_sets<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let longer = a.len().max(b.len());
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    a.intersection(b).count() as f64 / longer as f64
}

pub fn word_overlap(a: &LabeledExample, b: &LabeledExample, stoplist: &Stoplist) -> f64 {
    overlap_of_sets(
        &content_words(&tokenize(&a.text), stoplist),
        &content_words(&tokenize(&b.text), stoplist),
    )
}

/// Shared inputs for the metrics.
#[derive(Clone, Copy)]
pub struct AuditResources<'a> {
    pub stoplist: &'a Stoplist,
    /// Needed for `EmbeddingCosine`.
    pub embedder: Option<&'a dyn Embedder>,
    /// TF-IDF weighting; when absent `pairwise_max` fits one on both lists.
    pub tfidf: Option<&'a TfIdfModel>,
}

impl<'a> AuditResources<'a> {
    pub fn new(stoplist: &'a Stoplist) -> Self {
        AuditResources {
            stoplist,
            embedder: None,
            tfidf: None,
        }
    }

    pub fn with_embedder(mut self, embedder: &'a dyn Embedder) -> Self {
        self.embedder = Some(embedder);
        self
    }
}

/// Per-example representation for one metric.
enum Repr {
    Sets(Vec<Vec<u32>>),
    Sparse(Vec<SparseVector>),
    Dense(Vec<(Vec<f64>, f64)>),
}

/// Interns content words so overlap reduces to sorted-id intersection.
#[derive(Default)]
struct Interner(HashMap<String, u32>);

impl Interner {
    fn set_of(&mut self, text: &str, stoplist: &Stoplist) -> Vec<u32> {
        let mut ids: Vec<u32> = content_words(&tokenize(text), stoplist)
            .into_iter()
            .map(|w| {
                let next = self.0.len() as u32;
                *self.0.entry(w).or_insert(next)
            })
            .collect();
        ids.sort_unstable();
        ids
    }
}

fn sorted_overlap(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j, mut shared) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared as f64 / a.len().max(b.len()) as f64
}

fn dense_cosine(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> f64 {
    if a.1 == 0.0 || b.1 == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    dot / (a.1 * b.1)
}

fn tfidf_tokens(text: &str, stoplist: &Stoplist) -> crate::textkit::TokenList {
    remove_stopwords(&tokenize(text), stoplist)
}

fn build_repr(
    metric: MetricKind,
    set_name: &str,
    examples: &[LabeledExample],
    res: &AuditResources<'_>,
    tfidf: Option<&TfIdfModel>,
    interner: &mut Interner,
) -> Result<Repr> {
    Ok(match metric {
        MetricKind::WordOverlap => Repr::Sets(examples.iter().map(|e| interner.set_of(&e.text, res.stoplist)).collect()),
        MetricKind::TfIdfCosine => {
            let model = tfidf.expect("tf-idf model prepared");
            Repr::Sparse(
                examples
                    .par_iter()
                    .map(|e| model.transform(&tfidf_tokens(&e.text, res.stoplist)))
                    .collect(),
            )
        }
        MetricKind::EmbeddingCosine => {
            let embedder = res.embedder.ok_or(SimilarityError::MissingEmbedder)?;
            let texts: Vec<String> = examples.iter().map(|e| e.text.clone()).collect();
            let vectors = embedder.embed(&texts).map_err(|source| SimilarityError::Provider {
                set: set_name.to_string(),
                source,
            })?;
            Repr::Dense(
                vectors
                    .into_iter()
                    .map(|v| {
                        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        (v, n)
                    })
                    .collect(),
            )
        }
    })
}

fn max_scan(
    metric: MetricKind,
    generated: &[LabeledExample],
    gen_repr: &Repr,
    reference: &[LabeledExample],
    ref_repr: &Repr,
) -> SimilarityReport {
    let per_example_max: Vec<MaxMatch> = (0..generated.len())
        .into_par_iter()
        .map(|g| {
            let mut best = (0usize, f64::NEG_INFINITY, 0.0);
            for r in 0..reference.len() {
                let (score, raw) = match (gen_repr, ref_repr) {
                    (Repr::Sets(a), Repr::Sets(b)) => {
                        let s = sorted_overlap(&a[g], &b[r]);
                        (s, s)
                    }
                    (Repr::Sparse(a), Repr::Sparse(b)) => {
                        let s = cosine(&a[g], &b[r]);
                        (s, s)
                    }
                    (Repr::Dense(a), Repr::Dense(b)) => {
                        let raw = dense_cosine(&a[g], &b[r]);
                        (raw.clamp(0.0, 1.0), raw)
                    }
                    _ => unreachable!("representations built for the same metric"),
                };
                if score > best.1 {
                    best = (r, score, raw);
                }
            }
            MaxMatch {
                generated_id: generated[g].id.clone(),
                reference_id: reference[best.0].id.clone(),
                score: best.1,
                raw_score: (metric == MetricKind::EmbeddingCosine).then_some(best.2),
            }
        })
        .collect();
    let dataset_mean = per_example_max.iter().map(|m| m.score).sum::<f64>() / per_example_max.len() as f64;
    SimilarityReport {
        metric,
        per_example_max,
        dataset_mean,
    }
}

/// Best reference match per generated example, and the mean of those scores.
pub fn pairwise_max(
    generated: &[LabeledExample],
    reference: &[LabeledExample],
    metric: MetricKind,
    res: &AuditResources<'_>,
) -> Result<SimilarityReport> {
    if generated.is_empty() {
        return Err(SimilarityError::EmptyGenerated);
    }
    if reference.is_empty() {
        return Err(SimilarityError::EmptyReference);
    }
    let fitted;
    let tfidf = match (metric, res.tfidf) {
        (MetricKind::TfIdfCosine, None) => {
            let corpus: Vec<_> = generated
                .iter()
                .chain(reference)
                .map(|e| tfidf_tokens(&e.text, res.stoplist))
                .collect();
            fitted = fit_tfidf(&corpus)?;
            Some(&fitted)
        }
        (_, m) => m,
    };
    let mut interner = Interner::default();
    let g = build_repr(metric, "generated", generated, res, tfidf, &mut interner)?;
    let r = build_repr(metric, "reference", reference, res, tfidf, &mut interner)?;
    Ok(max_scan(metric, generated, &g, reference, &r))
}

pub fn overlap_stats(report: &SimilarityReport) -> Result<OverlapStats> {
    if report.metric != MetricKind::WordOverlap {
        return Err(SimilarityError::WrongMetric(report.metric));
    }
    if report.per_example_max.is_empty() {
        return Err(SimilarityError::EmptyReport);
    }
    let n = report.n() as f64;
    let max = report.scores().fold(f64::NEG_INFINITY, f64::max);
    Ok(OverlapStats {
        frac_above_two_thirds: report.scores().filter(|&s| s > 2.0 / 3.0).count() as f64 / n,
        max_percent: 100.0 * max,
        count_at_max: report.scores().filter(|&s| (s - max).abs() <= 1e-9).count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditPair {
    GeneratedTrain,
    GeneratedTest,
    TrainTest,
}

impl AuditPair {
    pub fn as_str(self) -> &'static str {
        match self {
            AuditPair::GeneratedTrain => "generated-train",
            AuditPair::GeneratedTest => "generated-test",
            AuditPair::TrainTest => "train-test",
        }
    }

    fn title(self, task: &str) -> String {
        match self {
            AuditPair::GeneratedTrain => format!("generated to {task}train"),
            AuditPair::GeneratedTest => format!("generated to {task}test"),
            AuditPair::TrainTest => format!("{task}train to {task}test"),
        }
    }
}

impl fmt::Display for AuditPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub pair: AuditPair,
    pub report: SimilarityReport,
}

/// Runs every requested metric over generated↔train, generated↔test and
/// train↔test (train on the generated side). When `generated` is empty only
/// the train↔test rows are produced.
///
/// TF-IDF weights are fit once on train, test and generated together.
pub fn audit(
    bundle: &DatasetBundle,
    generated: &[LabeledExample],
    metrics: &[MetricKind],
    res: &AuditResources<'_>,
) -> Result<Vec<AuditEntry>> {
    if bundle.train.is_empty() || bundle.test.is_empty() {
        return Err(SimilarityError::EmptyReference);
    }
    let mut metrics: Vec<MetricKind> = metrics.to_vec();
    metrics.sort();
    metrics.dedup();

    let fitted;
    let tfidf = if metrics.contains(&MetricKind::TfIdfCosine) && res.tfidf.is_none() {
        let corpus: Vec<_> = bundle
            .train
            .iter()
            .chain(&bundle.test)
            .chain(generated)
            .map(|e| tfidf_tokens(&e.text, res.stoplist))
            .collect();
        fitted = fit_tfidf(&corpus)?;
        Some(&fitted)
    } else {
        res.tfidf
    };

    let pairs: &[AuditPair] = if generated.is_empty() {
        &[AuditPair::TrainTest]
    } else {
        &[AuditPair::GeneratedTrain, AuditPair::GeneratedTest, AuditPair::TrainTest]
    };

    let mut reprs: HashMap<MetricKind, [Option<Repr>; 3]> = HashMap::new();
    let sets: [(&str, &[LabeledExample]); 3] = [
        ("generated", generated),
        ("train", &bundle.train),
        ("test", &bundle.test),
    ];
    for &metric in &metrics {
        let mut interner = Interner::default();
        let mut built: [Option<Repr>; 3] = [None, None, None];
        for (slot, (name, examples)) in sets.iter().enumerate() {
            if !examples.is_empty() {
                built[slot] = Some(build_repr(metric, name, examples, res, tfidf, &mut interner)?);
            }
        }
        reprs.insert(metric, built);
    }

    let mut out = Vec::new();
    for &pair in pairs {
        let (g, r) = match pair {
            AuditPair::GeneratedTrain => (0, 1),
            AuditPair::GeneratedTest => (0, 2),
            AuditPair::TrainTest => (1, 2),
        };
        for &metric in &metrics {
            let built = &reprs[&metric];
            let report = max_scan(
                metric,
                sets[g].1,
                built[g].as_ref().expect("non-empty set"),
                sets[r].1,
                built[r].as_ref().expect("non-empty set"),
            );
            out.push(AuditEntry { pair, report });
        }
    }
    Ok(out)
}

/// `pair,metric,mean,n` rows.
pub fn audit_csv(entries: &[AuditEntry]) -> String {
    let mut out = String::from("pair,metric,mean,n\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{:.6},{}\n",
            e.pair,
            e.report.metric,
            e.report.dataset_mean,
            e.report.n()
        ));
    }
    out
}

/// Markdown tables: mean similarity per pair and metric, then the
/// word-overlap statistics per pair.
pub fn audit_markdown(task: &str, entries: &[AuditEntry]) -> String {
    let mut metrics: Vec<MetricKind> = entries.iter().map(|e| e.report.metric).collect();
    metrics.sort();
    metrics.dedup();
    let mut pairs: Vec<AuditPair> = Vec::new();
    for e in entries {
        if !pairs.contains(&e.pair) {
            pairs.push(e.pair);
        }
    }
    let mut out = String::new();
    out.push_str("| |");
    for m in &metrics {
        out.push_str(&format!(" {} |", m.title()));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(metrics.len()));
    out.push('\n');
    for &p in &pairs {
        out.push_str(&format!("| {} |", p.title(task)));
        for &m in &metrics {
            match entries.iter().find(|e| e.pair == p && e.report.metric == m) {
                Some(e) => out.push_str(&format!(" {:.3} |", e.report.dataset_mean)),
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }
    let overlap: Vec<&AuditEntry> = entries.iter().filter(|e| e.report.metric == MetricKind::WordOverlap).collect();
    if !overlap.is_empty() {
        out.push_str("\n| | > 66% | Max % | # Exs at Max |\n|---|---|---|---|\n");
        for e in overlap {
            if let Ok(s) = overlap_stats(&e.report) {
                out.push_str(&format!(
                    "| {} | {:.1} | {:.0} | {} |\n",
                    e.pair.title(task),
                    100.0 * s.frac_above_two_thirds,
                    s.max_percent,
                    s.count_at_max
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::HashEmbedder;

    fn ex(id: &str, text: &str) -> LabeledExample {
        LabeledExample::new(id, text, "l").unwrap()
    }

    fn report_with(scores: &[f64]) -> SimilarityReport {
        SimilarityReport {
            metric: MetricKind::WordOverlap,
            per_example_max: scores
                .iter()
                .enumerate()
                .map(|(i, &s)| MaxMatch {
                    generated_id: format!("g{i}"),
                    reference_id: "r".into(),
                    score: s,
                    raw_score: None,
                })
                .collect(),
            dataset_mean: scores.iter().sum::<f64>() / scores.len() as f64,
        }
    }

    #[test]
    fn overlap_examples() {
        let stop = Stoplist::standard();
        let a = ex("a", "Play the latest jazz album");
        assert_eq!(word_overlap(&a, &a, &stop), 1.0);
        assert_eq!(word_overlap(&a, &ex("b", "weather in London tomorrow"), &stop), 0.0);
        assert_eq!(
            word_overlap(&ex("g", "Who invented the telephone?"), &ex("t", "who invented the telephone"), &stop),
            1.0
        );
        // both all-stopword: no evidence
        assert_eq!(word_overlap(&ex("x", "what is it"), &ex("y", "what is it"), &stop), 0.0);
        // denominator is the larger set: {jazz, album} vs {jazz}
        assert_eq!(word_overlap(&ex("x", "jazz album"), &ex("y", "jazz"), &stop), 0.5);
    }

    #[test]
    fn overlap_stats_examples() {
        let s = overlap_stats(&report_with(&[0.5, 0.7, 1.0, 1.0])).unwrap();
        assert_eq!(s.frac_above_two_thirds, 0.75);
        assert_eq!(s.max_percent, 100.0);
        assert_eq!(s.count_at_max, 2);
        let s = overlap_stats(&report_with(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!((s.frac_above_two_thirds, s.max_percent, s.count_at_max), (0.0, 0.0, 3));
        // strictly greater than 2/3
        let s = overlap_stats(&report_with(&[2.0 / 3.0])).unwrap();
        assert_eq!(s.frac_above_two_thirds, 0.0);
        let mut r = report_with(&[0.1]);
        r.metric = MetricKind::TfIdfCosine;
        assert!(matches!(overlap_stats(&r), Err(SimilarityError::WrongMetric(_))));
    }

    #[test]
    fn max_then_mean() {
        // g1 overlaps r1 at 1/1... build scores 0.5/1.0 by construction
        let stop = Stoplist::standard();
        let generated = vec![ex("g1", "red blue"), ex("g2", "green")];
        let reference = vec![ex("r0", "red"), ex("r1", "red blue"), ex("r2", "green yellow")];
        let r = pairwise_max(&generated, &reference, MetricKind::WordOverlap, &AuditResources::new(&stop)).unwrap();
        assert_eq!(r.per_example_max[0].score, 1.0);
        assert_eq!(r.per_example_max[0].reference_id, "r1");
        assert_eq!(r.per_example_max[1].score, 0.5);
        assert_eq!(r.per_example_max[1].reference_id, "r2");
        assert!((r.dataset_mean - 0.75).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_lowest_reference_index() {
        let stop = Stoplist::standard();
        let generated = vec![ex("g", "alpha")];
        let reference = vec![ex("r0", "beta"), ex("r1", "alpha"), ex("r2", "alpha")];
        let r = pairwise_max(&generated, &reference, MetricKind::WordOverlap, &AuditResources::new(&stop)).unwrap();
        assert_eq!(r.per_example_max[0].reference_id, "r1");
        // all zero: first reference
        let r = pairwise_max(&[ex("g", "zeta")], &reference, MetricKind::WordOverlap, &AuditResources::new(&stop)).unwrap();
        assert_eq!(r.per_example_max[0].reference_id, "r0");
    }

    #[test]
    fn self_comparison_is_one_for_every_metric() {
        let stop = Stoplist::standard();
        let hash = HashEmbedder::default();
        let res = AuditResources::new(&stop).with_embedder(&hash);
        let xs = vec![ex("a", "book a table for two"), ex("b", "play some jazz music"), ex("c", "rain in paris")];
        for m in MetricKind::ALL {
            let r = pairwise_max(&xs, &xs, m, &res).unwrap();
            assert!((r.dataset_mean - 1.0).abs() < 1e-12, "{m}");
        }
    }

    #[test]
    fn empty_inputs_and_missing_embedder() {
        let stop = Stoplist::standard();
        let res = AuditResources::new(&stop);
        let xs = vec![ex("a", "x y")];
        assert!(matches!(pairwise_max(&xs, &[], MetricKind::WordOverlap, &res), Err(SimilarityError::EmptyReference)));
        assert!(matches!(pairwise_max(&[], &xs, MetricKind::WordOverlap, &res), Err(SimilarityError::EmptyGenerated)));
        assert!(matches!(
            pairwise_max(&xs, &xs, MetricKind::EmbeddingCosine, &res),
            Err(SimilarityError::MissingEmbedder)
        ));
    }

    #[test]
    fn audit_counts_and_identity() {
        let stop = Stoplist::standard();
        let hash = HashEmbedder::default();
        let res = AuditResources::new(&stop).with_embedder(&hash);
        let train = vec![ex("t0", "rate this book five stars"), ex("t1", "add song to my playlist")];
        let test = vec![ex("s0", "play jazz"), ex("s1", "weather in rome")];
        let bundle = DatasetBundle::new("mini", train.clone(), vec![], test).unwrap();
        let generated: Vec<LabeledExample> = train.iter().map(|e| ex(&format!("g-{}", e.id), &e.text)).collect();
        let entries = audit(&bundle, &generated, &MetricKind::ALL, &res).unwrap();
        assert_eq!(entries.len(), 9);
        for e in entries.iter().filter(|e| e.pair == AuditPair::GeneratedTrain) {
            assert!((e.report.dataset_mean - 1.0).abs() < 1e-12);
        }
        let csv = audit_csv(&entries);
        assert_eq!(csv.lines().count(), 10);
        let md = audit_markdown("mini", &entries);
        assert!(md.contains("minitrain to minitest"));
        assert_eq!(audit(&bundle, &[], &MetricKind::ALL, &res).unwrap().len(), 3);
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("tfidf".parse::<MetricKind>().unwrap(), MetricKind::TfIdfCosine);
        assert_eq!("embed".parse::<MetricKind>().unwrap(), MetricKind::EmbeddingCosine);
        assert!("bleu".parse::<MetricKind>().is_err());
    }
}
