//! Synthetic data generation, contamination auditing and low-resource
//! benchmarking for text classification.

pub mod augment;
pub mod corpus;
pub mod evalbench;
pub mod providers;
pub mod resources;
pub mod rng;
pub mod similarity;
pub mod textkit;

pub use corpus::{DatasetBundle, LabeledExample, Provenance, Split};
pub use rng::SeededRng;
