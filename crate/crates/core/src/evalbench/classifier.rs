use serde::{Deserialize, Serialize};

use super::{EvalError, Result};
use crate::corpus::LabeledExample;
use crate::textkit::{tokenize, SparseVector, TfIdfModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Unused by the deterministic optimizer; recorded for manifests.
    pub seed: u64,
    /// Return the epoch with the best dev accuracy instead of the last one.
    pub early_stop_on_dev: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: 0.5,
            l2: 1e-4,
            seed: 0,
            early_stop_on_dev: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(EvalError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(EvalError::InvalidConfig(format!("l2 must be non-negative, got {}", self.l2)));
        }
        Ok(())
    }
}

/// Weights (row-major, `classes × dim`) and biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub classes: usize,
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Params {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        Params {
            classes,
            dim,
            weights: vec![0.0; classes * dim],
            bias: vec![0.0; classes],
        }
    }

    pub fn row(&self, c: usize) -> &[f64] {
        &self.weights[c * self.dim..(c + 1) * self.dim]
    }

    pub fn logits(&self, x: &SparseVector) -> Vec<f64> {
        (0..self.classes)
            .map(|c| {
                let row = self.row(c);
                self.bias[c] + x.entries().iter().map(|&(i, v)| row[i] * v).sum::<f64>()
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index of the first maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Feature vectors with class indices.
///
/// Objective: mean cross-entropy over examples plus `l2/2 · ‖W‖²`
/// (biases are not penalised).
#[derive(Debug, Clone)]
pub struct Problem {
    pub xs: Vec<SparseVector>,
    pub ys: Vec<usize>,
    pub classes: usize,
    pub dim: usize,
}

impl Problem {
    pub fn loss(&self, p: &Params, l2: f64) -> f64 {
        let n = self.xs.len().max(1) as f64;
        let ce: f64 = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, &y)| {
                let z = p.logits(x);
                let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                lse - z[y]
            })
            .sum();
        ce / n + 0.5 * l2 * p.weights.iter().map(|w| w * w).sum::<f64>()
    }

    pub fn gradient(&self, p: &Params, l2: f64) -> Params {
        let n = self.xs.len().max(1) as f64;
        let mut g = Params::zeros(p.classes, p.dim);
        for (x, &y) in self.xs.iter().zip(&self.ys) {
            let mut delta = softmax(&p.logits(x));
            delta[y] -= 1.0;
            for (c, d) in delta.iter().enumerate() {
                let d = d / n;
                g.bias[c] += d;
                let row = &mut g.weights[c * p.dim..(c + 1) * p.dim];
                for &(i, v) in x.entries() {
                    row[i] += d * v;
                }
            }
        }
        for (gw, w) in g.weights.iter_mut().zip(&p.weights) {
            *gw += l2 * w;
        }
        g
    }

    /// One full-batch gradient step.
    pub fn step(&self, p: &mut Params, lr: f64, l2: f64) {
        let g = self.gradient(p, l2);
        for (w, gw) in p.weights.iter_mut().zip(&g.weights) {
            *w -= lr * gw;
        }
        for (b, gb) in p.bias.iter_mut().zip(&g.bias) {
            *b -= lr * gb;
        }
    }

    fn accuracy(&self, p: &Params) -> f64 {
        if self.xs.is_empty() {
            return 0.0;
        }
        let correct = self
            .xs
            .iter()
            .zip(&self.ys)
            .filter(|(x, &y)| argmax(&p.logits(x)) == y)
            .count();
        correct as f64 / self.xs.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub params: Params,
    pub feature_model: TfIdfModel,
    pub label_order: Vec<String>,
    /// Epoch of the returned checkpoint (0 = initialization).
    pub best_epoch: usize,
    pub best_dev_accuracy: Option<f64>,
    /// Training loss after each epoch.
    pub loss_history: Vec<f64>,
}

/// Classifier features: every token, TF-IDF weighted (no stop-word removal).
pub fn featurize(model: &TfIdfModel, text: &str) -> SparseVector {
    model.transform(&tokenize(text))
}

fn problem_for(
    examples: &[LabeledExample],
    labels: &[String],
    feature_model: &TfIdfModel,
    split: &str,
) -> Result<Problem> {
    let mut xs = Vec::with_capacity(examples.len());
    let mut ys = Vec::with_capacity(examples.len());
    for e in examples {
        let y = labels
            .iter()
            .position(|l| *l == e.label)
            .ok_or_else(|| EvalError::UnknownLabel {
                label: e.label.clone(),
                split: split.to_string(),
            })?;
        xs.push(featurize(feature_model, &e.text));
        ys.push(y);
    }
    Ok(Problem {
        xs,
        ys,
        classes: labels.len(),
        dim: feature_model.dim(),
    })
}

/// Full-batch gradient descent from zero weights.
///
/// With `early_stop_on_dev` and a non-empty dev set, dev accuracy is checked
/// after every epoch and the best checkpoint is returned; ties go to the
/// later epoch.
pub fn train(
    train: &[LabeledExample],
    dev: &[LabeledExample],
    labels: &[String],
    feature_model: &TfIdfModel,
    config: &TrainConfig,
) -> Result<ClassifierModel> {
    config.validate()?;
    for label in labels {
        if !train.iter().any(|e| &e.label == label) {
            return Err(EvalError::MissingClass { label: label.clone() });
        }
    }
    let train_p = problem_for(train, labels, feature_model, "train")?;
    let dev_p = problem_for(dev, labels, feature_model, "dev")?;
    let use_dev = config.early_stop_on_dev && !dev.is_empty();

    let mut params = Params::zeros(labels.len(), feature_model.dim());
    let mut best = (0usize, use_dev.then(|| dev_p.accuracy(&params)), params.clone());
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        train_p.step(&mut params, config.learning_rate, config.l2);
        let loss = train_p.loss(&params, config.l2);
        if !loss.is_finite() || !params.is_finite() {
            return Err(EvalError::NonFiniteLoss { epoch });
        }
        history.push(loss);
        if use_dev {
            let acc = dev_p.accuracy(&params);
            if acc >= best.1.unwrap_or(0.0) {
                best = (epoch, Some(acc), params.clone());
            }
        }
    }
    let (best_epoch, best_dev_accuracy, params) = if use_dev {
        best
    } else {
        (config.epochs, None, params)
    };
    Ok(ClassifierModel {
        params,
        feature_model: feature_model.clone(),
        label_order: labels.to_vec(),
        best_epoch,
        best_dev_accuracy,
        loss_history: history,
    })
}

/// Predicted label and class probabilities; ties go to the earlier label.
pub fn predict(model: &ClassifierModel, example: &LabeledExample) -> (String, Vec<f64>) {
    let probs = softmax(&model.params.logits(&featurize(&model.feature_model, &example.text)));
    (model.label_order[argmax(&probs)].clone(), probs)
}

pub fn evaluate(model: &ClassifierModel, test: &[LabeledExample]) -> Result<f64> {
    if test.is_empty() {
        return Err(EvalError::EmptyTest);
    }
    let correct = test.iter().filter(|e| predict(model, e).0 == e.label).count();
    Ok(correct as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textkit::fit_tfidf;

    fn ex(id: &str, text: &str, label: &str) -> LabeledExample {
        LabeledExample::new(id, text, label).unwrap()
    }

    fn separable() -> (Vec<LabeledExample>, Vec<String>, TfIdfModel) {
        let train = vec![ex("0", "apple", "a"), ex("1", "banana", "b"), ex("2", "apple", "a"), ex("3", "banana", "b")];
        let fm = fit_tfidf(&train.iter().map(|e| tokenize(&e.text)).collect::<Vec<_>>()).unwrap();
        (train, vec!["a".into(), "b".into()], fm)
    }

    #[test]
    fn learns_separable_words() {
        let (train, labels, fm) = separable();
        let m = super::train(&train, &train, &labels, &fm, &TrainConfig::default()).unwrap();
        assert_eq!(evaluate(&m, &train).unwrap(), 1.0);
        assert_eq!(predict(&m, &train[1]).0, "b");
        let again = super::train(&train, &train, &labels, &fm, &TrainConfig::default()).unwrap();
        assert_eq!(m.params, again.params);
    }

    #[test]
    fn zero_epochs_is_uniform_first_label() {
        let (train, labels, fm) = separable();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let m = super::train(&train, &train, &labels, &fm, &cfg).unwrap();
        assert!(m.params.weights.iter().all(|&w| w == 0.0));
        let (label, probs) = predict(&m, &train[1]);
        assert_eq!(label, "a");
        assert_eq!(probs, vec![0.5, 0.5]);
        assert_eq!(evaluate(&m, &train).unwrap(), 0.5);
    }

    #[test]
    fn errors() {
        let (train, mut labels, fm) = separable();
        let m = super::train(&train, &[], &labels, &fm, &TrainConfig::default()).unwrap();
        assert!(matches!(evaluate(&m, &[]), Err(EvalError::EmptyTest)));
        labels.push("c".into());
        assert!(matches!(
            super::train(&train, &[], &labels, &fm, &TrainConfig::default()),
            Err(EvalError::MissingClass { .. })
        ));
        let bad = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(super::train(&train, &[], &labels[..2], &fm, &bad).is_err());
        let huge = TrainConfig {
            learning_rate: 1e308,
            ..TrainConfig::default()
        };
        assert!(matches!(
            super::train(&train, &[], &labels[..2], &fm, &huge),
            Err(EvalError::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn softmax_sums_to_one() {
        for z in [vec![0.0, 0.0], vec![1000.0, -1000.0, 3.0], vec![-5.0]] {
            assert!((softmax(&z).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
    }
}
