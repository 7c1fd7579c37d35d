//! Small labelled datasets in the library's JSONL layout.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::grammar::{fixture_sentence, SNIPS_LABELS, SST2_LABELS, TREC_LABELS};
use crate::{hash_str, Rng};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    pub text: String,
    pub label: String,
    pub split: String,
}

/// Examples per label in each split.
#[derive(Debug, Clone, Copy)]
pub struct Sizes {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
}

pub fn labels_of(task: &str) -> &'static [&'static str] {
    match task {
        "sst2" => &SST2_LABELS,
        "snips" => &SNIPS_LABELS,
        _ => &TREC_LABELS,
    }
}

pub fn default_sizes(task: &str) -> Sizes {
    match task {
        "sst2" => Sizes {
            train: 150,
            dev: 40,
            test: 200,
        },
        _ => Sizes {
            train: 40,
            dev: 12,
            test: 20,
        },
    }
}

/// Records for `task` (`sst2`, `snips` or `trec`). Texts are unique within
/// each split; the same sentence may occur in different splits, as it does
/// in real benchmarks.
pub fn generate(task: &str, sizes: Sizes, seed: u64) -> Vec<Record> {
    let mut rng = Rng::new(seed ^ hash_str(task));
    let mut out = Vec::new();
    for (split, per_label) in [("train", sizes.train), ("dev", sizes.dev), ("test", sizes.test)] {
        let mut seen = HashSet::new();
        let mut i = 0;
        // interleave labels so files are not sorted by class
        for _ in 0..per_label {
            for label in labels_of(task) {
                let mut text = fixture_sentence(&mut rng, task, label);
                let mut tries = 0;
                while !seen.insert(text.clone()) && tries < 100 {
                    text = fixture_sentence(&mut rng, task, label);
                    tries += 1;
                }
                out.push(Record {
                    id: format!("{task}-{split}-{i}"),
                    text,
                    label: label.to_string(),
                    split: split.to_string(),
                });
                i += 1;
            }
        }
    }
    out
}

pub fn write_jsonl(records: &[Record], path: &Path) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_determinism() {
        let s = Sizes { train: 3, dev: 2, test: 1 };
        let a = generate("snips", s, 1);
        assert_eq!(a.len(), 7 * 6);
        assert_eq!(a, generate("snips", s, 1));
        assert_ne!(a, generate("snips", s, 2));
        assert_eq!(a.iter().filter(|r| r.split == "dev" && r.label == "GetWeather").count(), 2);
    }
}
