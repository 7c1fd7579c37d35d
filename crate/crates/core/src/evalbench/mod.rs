//! Low-resource benchmark harness: seeded subsampling, augmentation,
//! a TF-IDF logistic-regression classifier and repeated evaluation.

mod classifier;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classifier::{argmax, evaluate, featurize, predict, softmax, train, ClassifierModel, Params, Problem, TrainConfig};

use crate::augment::{apply_recipe, AugmentContext, AugmentError, AugmentMethod, AugmentationRecipe};
use crate::corpus::{subsample, CorpusError, DatasetBundle, LabeledExample, SubsampleSpec};
use crate::rng::SeededRng;
use crate::textkit::{fit_tfidf, tokenize, TextError};

pub const DEFAULT_REPETITIONS: usize = 15;
pub const DEFAULT_PER_CLASS: usize = 10;
pub const SWEEP_KS: [usize; 6] = [1, 2, 4, 8, 16, 32];
pub const NO_TRAIN_PER_CLASS: usize = 20;
/// Share of each class's generated examples used for training when no
/// original data is available; the rest form the dev set.
pub const NO_TRAIN_TRAIN_FRACTION: f64 = 0.75;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTest,
    #[error("class `{label}` has no training examples")]
    MissingClass { label: String },
    #[error("label `{label}` in the {split} set is not a known class")]
    UnknownLabel { label: String, split: String },
    #[error("training loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no-training-data run consumed {0} original examples")]
    OriginalDataUsed(usize),
    #[error("repetition {rep}: {source}")]
    Repetition {
        rep: usize,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Text(#[from] TextError),
}

pub type Result<T> = std::result::Result<T, EvalError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub per_class: usize,
    pub repetitions: usize,
    /// Repetition `r` uses seed `base_seed + r`.
    pub base_seed: u64,
    pub train: TrainConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            per_class: DEFAULT_PER_CLASS,
            repetitions: DEFAULT_REPETITIONS,
            base_seed: 0,
            train: TrainConfig::default(),
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(EvalError::InvalidConfig("repetitions must be positive".into()));
        }
        if self.per_class == 0 {
            return Err(EvalError::InvalidConfig("per-class count must be positive".into()));
        }
        self.train.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionDetail {
    pub rep: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub original_train: usize,
    pub generated_train: usize,
    pub dev: usize,
    pub best_epoch: usize,
}

/// One table cell: accuracies over repetitions for (task, method, K).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub task: String,
    pub method: String,
    pub k: usize,
    pub per_rep_accuracy: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub sample_std: f64,
    pub reps: Vec<RepetitionDetail>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let sample = if values.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, (ss / n).sqrt(), sample)
}

impl ExperimentResult {
    pub fn from_reps(task: &str, method: &str, k: usize, mut reps: Vec<RepetitionDetail>) -> Self {
        reps.sort_by_key(|r| r.rep);
        let per_rep_accuracy: Vec<f64> = reps.iter().map(|r| r.accuracy).collect();
        let (mean, std, sample_std) = mean_std(&per_rep_accuracy);
        ExperimentResult {
            task: task.to_string(),
            method: method.to_string(),
            k,
            per_rep_accuracy,
            mean,
            std,
            sample_std,
            reps,
        }
    }
}

pub fn method_name(recipe: Option<&AugmentationRecipe>) -> String {
    recipe.map_or_else(|| "no-aug".to_string(), |r| r.method.to_string())
}

fn fit_train_eval(
    bundle: &DatasetBundle,
    train_set: &[LabeledExample],
    dev: &[LabeledExample],
    config: &TrainConfig,
) -> Result<(f64, usize)> {
    let docs: Vec<_> = train_set.iter().map(|e| tokenize(&e.text)).collect();
    let features = fit_tfidf(&docs)?;
    let model = train(train_set, dev, &bundle.labels, &features, config)?;
    Ok((evaluate(&model, &bundle.test)?, model.best_epoch))
}

fn run_reps(
    config: &ExperimentConfig,
    one: impl Fn(usize, u64) -> Result<RepetitionDetail> + Sync,
) -> Result<Vec<RepetitionDetail>> {
    (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            one(rep, config.base_seed.wrapping_add(rep as u64)).map_err(|e| EvalError::Repetition {
                rep,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Per repetition: subsample train and dev, augment the subsampled train
/// set, fit features on train plus generated data, train with dev
/// checkpointing and score the full test set.
pub fn run_experiment(
    bundle: &DatasetBundle,
    recipe: Option<&AugmentationRecipe>,
    ctx: &AugmentContext<'_>,
    config: &ExperimentConfig,
) -> Result<ExperimentResult> {
    config.validate()?;
    if let Some(r) = recipe {
        r.validate()?;
    }
    if bundle.test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let reps = run_reps(config, |rep, seed| {
        let sub = subsample(bundle, &SubsampleSpec::new(config.per_class, seed)?)?;
        let generated = match recipe {
            Some(r) => apply_recipe(&r.reseeded(seed), &sub.train, &bundle.labels, ctx)?,
            None => Vec::new(),
        };
        let mut train_set = sub.train.clone();
        train_set.extend(generated.iter().cloned());
        let (accuracy, best_epoch) = fit_train_eval(bundle, &train_set, &sub.dev, &config.train)?;
        Ok(RepetitionDetail {
            rep,
            seed,
            accuracy,
            original_train: sub.train.len(),
            generated_train: generated.len(),
            dev: sub.dev.len(),
            best_epoch,
        })
    })?;
    Ok(ExperimentResult::from_reps(
        &bundle.task_name,
        &method_name(recipe),
        recipe.map_or(0, |r| r.k),
        reps,
    ))
}

/// Every recipe at every K. All (method, K) pairs are validated before any
/// experiment runs.
pub fn sweep_k(
    bundle: &DatasetBundle,
    recipes: &[AugmentationRecipe],
    ks: &[usize],
    ctx: &AugmentContext<'_>,
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentResult>> {
    let mut cells = Vec::new();
    for r in recipes {
        for &k in ks {
            let cell = AugmentationRecipe { k, ..r.clone() };
            cell.validate()?;
            cells.push(cell);
        }
    }
    cells.iter().map(|c| run_experiment(bundle, Some(c), ctx, config)).collect()
}

/// Seeded per-class split of generated examples into train and dev.
pub fn split_generated(generated: &[LabeledExample], labels: &[String], seed: u64) -> (Vec<LabeledExample>, Vec<LabeledExample>) {
    let mut rng = SeededRng::new(seed);
    let (mut train, mut dev) = (Vec::new(), Vec::new());
    for label in labels {
        let mut members: Vec<&LabeledExample> = generated.iter().filter(|e| &e.label == label).collect();
        rng.shuffle(&mut members);
        let cut = (members.len() as f64 * NO_TRAIN_TRAIN_FRACTION).round() as usize;
        train.extend(members[..cut].iter().map(|e| (*e).clone()));
        dev.extend(members[cut..].iter().map(|e| (*e).clone()));
    }
    (train, dev)
}

/// Trains on zero-shot generations alone (`per_class` per label, split into
/// train and dev) and scores the full test set.
pub fn run_no_train_scenario(
    bundle: &DatasetBundle,
    recipe: &AugmentationRecipe,
    per_class: usize,
    ctx: &AugmentContext<'_>,
    config: &ExperimentConfig,
) -> Result<ExperimentResult> {
    config.validate()?;
    if recipe.method != AugmentMethod::LlmZeroShot {
        return Err(EvalError::InvalidConfig(format!(
            "the no-training-data scenario needs llm-zero generation, got {}",
            recipe.method
        )));
    }
    if bundle.test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let recipe = AugmentationRecipe { k: per_class, ..recipe.clone() };
    recipe.validate()?;
    let reps = run_reps(config, |rep, seed| {
        let generated = apply_recipe(&recipe.reseeded(seed), &[], &bundle.labels, ctx)?;
        let (train_set, dev) = split_generated(&generated, &bundle.labels, seed);
        let original = train_set.iter().chain(&dev).filter(|e| e.provenance.is_original()).count();
        if original > 0 {
            return Err(EvalError::OriginalDataUsed(original));
        }
        let (accuracy, best_epoch) = fit_train_eval(bundle, &train_set, &dev, &config.train)?;
        Ok(RepetitionDetail {
            rep,
            seed,
            accuracy,
            original_train: 0,
            generated_train: train_set.len(),
            dev: dev.len(),
            best_epoch,
        })
    })?;
    Ok(ExperimentResult::from_reps(&bundle.task_name, "llm-zero-no-train", per_class, reps))
}

/// Accuracy of always predicting the most frequent test label.
pub fn majority_baseline(test: &[LabeledExample]) -> f64 {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in test {
        *counts.entry(&e.label).or_default() += 1;
    }
    counts.values().max().map_or(0.0, |&m| m as f64 / test.len() as f64)
}

/// `task,method,K,rep,accuracy`
pub fn per_rep_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("task,method,K,rep,accuracy\n");
    for r in results {
        for d in &r.reps {
            out.push_str(&format!("{},{},{},{},{:.6}\n", r.task, r.method, r.k, d.rep, d.accuracy));
        }
    }
    out
}

/// `task,method,K,mean,std,n`
pub fn aggregate_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("task,method,K,mean,std,n\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{}\n",
            r.task,
            r.method,
            r.k,
            r.mean,
            r.std,
            r.per_rep_accuracy.len()
        ));
    }
    out
}

/// Plot data: `method,K,mean,std`.
pub fn sweep_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from("method,K,mean,std\n");
    for r in results {
        out.push_str(&format!("{},{},{:.6},{:.6}\n", r.method, r.k, r.mean, r.std));
    }
    out
}

/// Methods as rows, tasks as columns, cells `mean (std)` in percent.
pub fn results_markdown(results: &[ExperimentResult]) -> String {
    let mut tasks: Vec<&str> = Vec::new();
    let mut rows: Vec<(String, usize)> = Vec::new();
    for r in results {
        if !tasks.contains(&r.task.as_str()) {
            tasks.push(&r.task);
        }
        if !rows.contains(&(r.method.clone(), r.k)) {
            rows.push((r.method.clone(), r.k));
        }
    }
    let mut out = String::from("| Method | K |");
    for t in &tasks {
        out.push_str(&format!(" {t} |"));
    }
    out.push_str("\n|---|---|");
    out.push_str(&"---|".repeat(tasks.len()));
    out.push('\n');
    for (method, k) in &rows {
        out.push_str(&format!("| {method} | {k} |"));
        for t in &tasks {
            match results.iter().find(|r| &r.method == method && r.k == *k && r.task == *t) {
                Some(r) => out.push_str(&format!(" {:.1} ({:.1}) |", 100.0 * r.mean, 100.0 * r.std)),
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::Thesaurus;
    use crate::textkit::Stoplist;

    fn tiny_bundle() -> DatasetBundle {
        let mut train = Vec::new();
        let mut dev = Vec::new();
        let mut test = Vec::new();
        let pos = ["great", "wonderful", "superb", "excellent"];
        let neg = ["awful", "terrible", "dreadful", "boring"];
        for i in 0..12 {
            let p = LabeledExample::new(format!("p{i}"), format!("a {} film", pos[i % 4]), "positive").unwrap();
            let n = LabeledExample::new(format!("n{i}"), format!("a {} film", neg[i % 4]), "negative").unwrap();
            let target = match i % 3 {
                0 => &mut train,
                1 => &mut dev,
                _ => &mut test,
            };
            target.push(p);
            target.push(n);
        }
        DatasetBundle::new("tiny", train, dev, test).unwrap()
    }

    #[test]
    fn population_and_sample_std() {
        let (m, p, s) = mean_std(&[0.5, 0.7]);
        assert!((m - 0.6).abs() < 1e-12);
        assert!((p - 0.1).abs() < 1e-12);
        assert!((s - 0.1 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[0.3]), (0.3, 0.0, 0.0));
    }

    #[test]
    fn experiment_shape_and_determinism() {
        let th = Thesaurus::standard();
        let stop = Stoplist::standard();
        let ctx = AugmentContext {
            thesaurus: &th,
            stoplist: &stop,
            provider: None,
        };
        let b = tiny_bundle();
        let cfg = ExperimentConfig {
            per_class: 2,
            repetitions: 4,
            ..ExperimentConfig::default()
        };
        let none = run_experiment(&b, None, &ctx, &cfg).unwrap();
        assert_eq!(none.per_rep_accuracy.len(), 4);
        assert_eq!(none.method, "no-aug");
        assert_eq!(none, run_experiment(&b, None, &ctx, &cfg).unwrap());
        let eda = AugmentationRecipe::eda(1, 0.1, 0);
        let sweep = sweep_k(&b, &[eda], &[1, 2], &ctx, &cfg).unwrap();
        assert_eq!(sweep.len(), 2);
        assert_eq!(sweep[1].reps[0].generated_train, 2 * sweep[1].reps[0].original_train);
        assert_eq!(aggregate_csv(&sweep).lines().count(), 3);
        assert_eq!(per_rep_csv(&sweep).lines().count(), 9);
        let one = ExperimentConfig {
            repetitions: 1,
            ..cfg
        };
        assert_eq!(run_experiment(&b, None, &ctx, &one).unwrap().std, 0.0);
    }

    #[test]
    fn sweep_rejects_short_pivot_lists_up_front() {
        let th = Thesaurus::standard();
        let stop = Stoplist::standard();
        let ctx = AugmentContext {
            thesaurus: &th,
            stoplist: &stop,
            provider: None,
        };
        let pivots = ["de", "fr", "es", "ru"].iter().map(|s| s.to_string()).collect();
        let bt = AugmentationRecipe::back_translation(1, pivots, 0);
        let err = sweep_k(&tiny_bundle(), &[bt], &SWEEP_KS, &ctx, &ExperimentConfig::default()).unwrap_err();
        assert!(err.to_string().contains("needs 8 pivot languages"), "{err}");
    }

    #[test]
    fn generated_split_is_per_class() {
        let gen: Vec<LabeledExample> = (0..40)
            .map(|i| LabeledExample::new(format!("g{i}"), "x", if i % 2 == 0 { "a" } else { "b" }).unwrap())
            .collect();
        let (tr, dv) = split_generated(&gen, &["a".into(), "b".into()], 3);
        assert_eq!((tr.len(), dv.len()), (30, 10));
        assert_eq!(tr.iter().filter(|e| e.label == "a").count(), 15);
        assert_eq!(majority_baseline(&gen), 0.5);
    }
}
