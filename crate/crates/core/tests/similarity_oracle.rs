mod common;

use proptest::prelude::*;
use synthaug::corpus::{DatasetBundle, LabeledExample};
use synthaug::providers::HashEmbedder;
use synthaug::similarity::{audit, pairwise_max, AuditResources, MetricKind};
use synthaug::textkit::Stoplist;

fn compare(seed: u64) -> Result<(), TestCaseError> {
    let corpus = common::micro_corpus(seed);
    let stop = Stoplist::standard();
    let embedder = HashEmbedder::default();
    let bundle = DatasetBundle::new("micro", corpus.train.clone(), Vec::new(), corpus.test.clone()).unwrap();
    let res = AuditResources::new(&stop).with_embedder(&embedder);
    let entries = audit(&bundle, &corpus.generated, &MetricKind::ALL, &res).unwrap();
    let expected = common::oracle_audit(&corpus, &stop, &|t| embedder.embed_one(t));
    prop_assert_eq!(entries.len(), expected.len());
    for e in &entries {
        let want = &expected[&(e.pair.as_str(), e.report.metric.short_name())];
        prop_assert!((e.report.dataset_mean - want.mean).abs() < 1e-9);
        for (got, want) in e.report.scores().zip(&want.scores) {
            prop_assert!((got - want).abs() < 1e-9, "{} {}: {got} vs {want}", e.pair.as_str(), e.report.metric.short_name());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn audit_matches_brute_force(seed in any::<u64>()) {
        compare(seed)?;
    }

    #[test]
    fn scores_are_bounded(seed in any::<u64>()) {
        let corpus = common::micro_corpus(seed);
        let stop = Stoplist::standard();
        let embedder = HashEmbedder::default();
        let res = AuditResources::new(&stop).with_embedder(&embedder);
        for metric in MetricKind::ALL {
            let report = pairwise_max(&corpus.generated, &corpus.train, metric, &res).unwrap();
            prop_assert_eq!(report.n(), corpus.generated.len());
            for s in report.scores() {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
            }
        }
    }

    #[test]
    fn overlap_is_symmetric(seed in any::<u64>()) {
        let corpus = common::micro_corpus(seed);
        let stop = Stoplist::standard();
        for a in &corpus.train {
            for b in &corpus.test {
                let ab = synthaug::similarity::word_overlap(a, b, &stop);
                let ba = synthaug::similarity::word_overlap(b, a, &stop);
                prop_assert_eq!(ab, ba);
            }
        }
    }
}

#[test]
fn a_set_against_itself_scores_one_when_it_has_content() {
    let stop = Stoplist::standard();
    let embedder = HashEmbedder::default();
    let res = AuditResources::new(&stop).with_embedder(&embedder);
    let docs = vec![
        LabeledExample::new("a", "the quiet harbour at dawn", "x").unwrap(),
        LabeledExample::new("b", "loud trains and crowded stations", "x").unwrap(),
    ];
    for metric in MetricKind::ALL {
        let r = pairwise_max(&docs, &docs, metric, &res).unwrap();
        assert!((r.dataset_mean - 1.0).abs() < 1e-12, "{metric:?}");
        assert_eq!(r.per_example_max[1].reference_id, "b");
    }
}

#[test]
fn ties_go_to_the_first_reference() {
    let stop = Stoplist::standard();
    let res = AuditResources::new(&stop);
    let gen = vec![LabeledExample::new("g", "red apple", "x").unwrap()];
    let refs = vec![
        LabeledExample::new("r0", "green pear", "x").unwrap(),
        LabeledExample::new("r1", "red car", "x").unwrap(),
        LabeledExample::new("r2", "apple pie", "x").unwrap(),
    ];
    let r = pairwise_max(&gen, &refs, MetricKind::WordOverlap, &res).unwrap();
    assert_eq!(r.per_example_max[0].reference_id, "r1");
    assert_eq!(r.per_example_max[0].score, 0.5);
}
