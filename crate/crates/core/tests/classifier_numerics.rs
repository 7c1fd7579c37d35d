mod common;

use proptest::prelude::*;
use synthaug::corpus::LabeledExample;
use synthaug::evalbench::{evaluate, predict, softmax, train, Params, Problem, TrainConfig};
use synthaug::textkit::{fit_tfidf, tokenize, SparseVector};

#[test]
fn analytic_gradient_matches_finite_differences() {
    for seed in 0..100 {
        let (problem, params, l2) = common::random_problem(seed);
        let err = common::max_gradient_error(&problem, &params, l2);
        assert!(err < 1e-4, "seed {seed}: relative error {err}");
    }
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(logits in prop::collection::vec(-700.0f64..700.0, 1..12)) {
        let p = softmax(&logits);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}

fn fixture() -> (Vec<LabeledExample>, Vec<LabeledExample>) {
    let rows = [
        ("a great and moving film", "pos"),
        ("wonderful acting and a great story", "pos"),
        ("i loved every minute", "pos"),
        ("a dull and boring mess", "neg"),
        ("terrible plot and awful acting", "neg"),
        ("i hated every minute", "neg"),
    ];
    let ex: Vec<LabeledExample> = rows
        .iter()
        .enumerate()
        .map(|(i, (t, l))| LabeledExample::new(format!("e{i}"), *t, *l).unwrap())
        .collect();
    let test = vec![
        LabeledExample::new("t0", "a great story", "pos").unwrap(),
        LabeledExample::new("t1", "boring and awful", "neg").unwrap(),
    ];
    (ex, test)
}

#[test]
fn loss_never_increases_with_a_small_step() {
    let (examples, _) = fixture();
    let tokens: Vec<_> = examples.iter().map(|e| tokenize(&e.text)).collect();
    let model = fit_tfidf(&tokens).unwrap();
    let xs: Vec<SparseVector> = tokens.iter().map(|t| model.transform(t)).collect();
    let ys = examples.iter().map(|e| usize::from(e.label == "pos")).collect();
    let problem = Problem { xs, ys, classes: 2, dim: model.dim() };
    let mut params = Params::zeros(2, model.dim());
    let mut prev = problem.loss(&params, 1e-4);
    for step in 0..500 {
        problem.step(&mut params, 1e-3, 1e-4);
        let now = problem.loss(&params, 1e-4);
        assert!(now <= prev + 1e-15, "step {step}: {prev} -> {now}");
        prev = now;
    }
}

#[test]
fn learns_a_separable_fixture() {
    let (examples, test) = fixture();
    let labels = vec!["neg".to_string(), "pos".to_string()];
    let cfg = TrainConfig { early_stop_on_dev: false, ..TrainConfig::default() };
    let tokens: Vec<_> = examples.iter().map(|e| tokenize(&e.text)).collect();
    let features = fit_tfidf(&tokens).unwrap();
    let model = train(&examples, &[], &labels, &features, &cfg).unwrap();
    assert_eq!(evaluate(&model, &examples).unwrap(), 1.0);
    assert_eq!(evaluate(&model, &test).unwrap(), 1.0);
    let (label, probs) = predict(&model, &test[0]);
    assert_eq!(label, "pos");
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}
