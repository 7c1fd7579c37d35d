//! `synthaug`: subsample, augment, audit and bench from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use manifest::RunManifest;
use synthaug::providers::ReplayMode;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "synthaug", version, about = "Synthetic data augmentation, contamination audit and benchmark runner", args_conflicts_with_subcommands = true)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Re-execute the run described by a manifest in replay mode and check
    /// that its outputs are reproduced.
    #[arg(long, value_name = "MANIFEST")]
    pub from_manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Draw a fixed number of examples per class from train and dev.
    Subsample(SubsampleArgs),
    /// Generate augmented examples for a training set.
    Augment(AugmentArgs),
    /// Measure similarity between generated, training and test data.
    Audit(AuditArgs),
    /// Run repeated low-resource experiments.
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Subsample(_) => "subsample",
            Command::Augment(_) => "augment",
            Command::Audit(_) => "audit",
            Command::Bench(_) => "bench",
        }
    }

    fn provider_args_mut(&mut self) -> Option<&mut ProviderArgs> {
        match self {
            Command::Subsample(_) => None,
            Command::Augment(a) => Some(&mut a.provider),
            Command::Audit(a) => Some(&mut a.provider),
            Command::Bench(a) => Some(&mut a.provider),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProviderArgs {
    /// record, replay or passthrough (default: $AUG_REPLAY_MODE, else replay).
    #[arg(long, value_name = "MODE")]
    pub replay_mode: Option<ReplayMode>,
    /// Cassette file (default: $AUG_CASSETTE).
    #[arg(long, value_name = "PATH")]
    pub cassette: Option<PathBuf>,
    /// Request rate limit for live calls.
    #[arg(long, value_name = "RPS")]
    pub rps: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SubsampleArgs {
    /// Dataset file or directory of split files.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// jsonl or tsv (default: from the file extension).
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub per_class: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AugmentArgs {
    /// Dataset whose train split is augmented.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub format: Option<String>,
    /// eda, backtrans, llm-zero or llm-few.
    #[arg(long)]
    pub method: String,
    /// Generated examples per training example (per class for llm-zero with --total unset and no train data).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.10)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prompt catalog JSON (default: the bundled catalog).
    #[arg(long, value_name = "PATH")]
    pub prompts: Option<PathBuf>,
    /// Task whose prompts are used (default: the dataset name).
    #[arg(long)]
    pub task: Option<String>,
    /// Pivot languages for back-translation, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub pivots: Vec<String>,
    /// Items requested per chat call.
    #[arg(long, default_value_t = synthaug::augment::DEFAULT_PER_CALL)]
    pub per_call: usize,
    /// Zero-shot examples per label, overriding K times the training count.
    #[arg(long)]
    pub total: Option<usize>,
    #[command(flatten)]
    pub provider: ProviderArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AuditArgs {
    /// Dataset providing both train and test splits.
    #[arg(long, value_name = "PATH", required_unless_present_all = ["train", "test"])]
    pub dataset: Option<PathBuf>,
    /// Reference training examples (all records in the file).
    #[arg(long, value_name = "PATH", conflicts_with = "dataset", requires = "test")]
    pub train: Option<PathBuf>,
    #[arg(long, value_name = "PATH", conflicts_with = "dataset", requires = "train")]
    pub test: Option<PathBuf>,
    /// Generated examples to audit.
    #[arg(long, value_name = "PATH")]
    pub generated: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "embed,tfidf,overlap")]
    pub metrics: Vec<String>,
    /// hash (offline) or provider.
    #[arg(long, default_value = "hash")]
    pub embedder: String,
    /// Stop-word list file (default: the bundled English list).
    #[arg(long, value_name = "PATH")]
    pub stopwords: Option<PathBuf>,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BenchArgs {
    /// Dataset with train, dev and test splits.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub format: Option<String>,
    /// Methods to compare: no-aug, eda, backtrans, llm-zero, llm-few.
    #[arg(long, value_delimiter = ',', default_value = "no-aug")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Sweep K over these values for every augmenting method.
    #[arg(long, value_delimiter = ',', num_args = 0.., default_missing_value = "1,2,4,8,16,32")]
    pub sweep_k: Option<Vec<usize>>,
    /// Train on zero-shot generations only.
    #[arg(long, conflicts_with = "sweep_k")]
    pub no_train_data: bool,
    /// Generated examples per class for --no-train-data.
    #[arg(long, default_value_t = synthaug::evalbench::NO_TRAIN_PER_CLASS)]
    pub generated_per_class: usize,
    #[arg(long, default_value_t = synthaug::evalbench::DEFAULT_REPETITIONS)]
    pub reps: usize,
    #[arg(long, default_value_t = synthaug::evalbench::DEFAULT_PER_CLASS)]
    pub per_class: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.10)]
    pub alpha: f64,
    #[arg(long, value_delimiter = ',')]
    pub pivots: Vec<String>,
    #[arg(long, value_name = "PATH")]
    pub prompts: Option<PathBuf>,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long, default_value_t = synthaug::augment::DEFAULT_PER_CALL)]
    pub per_call: usize,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// Bad flag combinations found after parsing; exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    if let Some(path) = &cli.from_manifest {
        return rerun(path);
    }
    let Some(command) = cli.command else {
        let mut cmd = Cli::command();
        cmd.error(clap::error::ErrorKind::MissingSubcommand, "a subcommand or --from-manifest is required")
            .exit();
    };
    commands::execute(&command, &argv)
}

/// Replays a recorded run and compares output hashes.
fn rerun(path: &std::path::Path) -> Result<()> {
    let recorded = RunManifest::load(path)?;
    std::env::set_current_dir(&recorded.cwd)
        .with_context(|| format!("entering recorded working directory {}", recorded.cwd.display()))?;
    let parsed = Cli::try_parse_from(&recorded.argv).context("manifest arguments no longer parse")?;
    let Some(mut command) = parsed.command else {
        bail!("manifest does not name a command");
    };
    if let Some(cassette) = &recorded.cassette {
        let now = manifest::sha256_file(&cassette.path)?;
        if now != cassette.sha256 {
            log::warn!(
                "cassette {} changed since the run was recorded; relying on output hashes",
                cassette.path.display()
            );
        }
    }
    if let Some(p) = command.provider_args_mut() {
        p.replay_mode = Some(ReplayMode::Replay);
        if let Some(c) = &recorded.cassette {
            p.cassette = Some(c.path.clone());
        }
    }
    commands::execute(&command, &recorded.argv)?;
    let mismatched = recorded.mismatched_outputs();
    if !mismatched.is_empty() {
        let list: Vec<String> = mismatched.iter().map(|p| p.display().to_string()).collect();
        bail!("outputs differ from the manifest: {}", list.join(", "));
    }
    println!("reproduced {} outputs of `{}`", recorded.outputs.len(), recorded.command);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
