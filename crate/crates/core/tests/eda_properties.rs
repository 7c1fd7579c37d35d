mod common;

use std::path::Path;
use std::sync::OnceLock;

use proptest::prelude::*;
use synthaug::augment::Thesaurus;
use synthaug::textkit::Stoplist;

fn thesaurus() -> &'static Thesaurus {
    static TH: OnceLock<Thesaurus> = OnceLock::new();
    TH.get_or_init(Thesaurus::standard)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn operations_keep_their_invariants(seed in any::<u64>()) {
        let stop = Stoplist::standard();
        if let Err(e) = common::check_eda_case(seed, thesaurus(), &stop) {
            return Err(TestCaseError::fail(e));
        }
    }
}

#[test]
fn matches_frozen_vectors() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/eda_vectors.json");
    let cases = common::load_eda_vectors(&path);
    assert!(cases.len() >= 100);
    let mismatches = common::eda_vector_mismatches(&cases, thesaurus(), &Stoplist::standard());
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}
