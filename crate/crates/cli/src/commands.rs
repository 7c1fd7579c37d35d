use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};

use synthaug::augment::{
    apply_recipe, llm_zero_shot, AugmentContext, AugmentMethod, AugmentationRecipe, PromptCatalog, Thesaurus,
    ZeroShotConfig,
};
use synthaug::corpus::{self, DatasetBundle, Format, LabeledExample, Split, SubsampleSpec};
use synthaug::evalbench::{self, ExperimentConfig, ExperimentResult, TrainConfig};
use synthaug::providers::{Embedder, HashEmbedder, Provider, ProviderConfig, ProviderEmbedder};
use synthaug::similarity::{self, AuditResources, MetricKind};
use synthaug::textkit::Stoplist;

use crate::manifest::{FileDigest, RunManifest, MANIFEST_FILE};
use crate::{AugmentArgs, AuditArgs, BenchArgs, Command, ProviderArgs, SubsampleArgs, UsageError};

pub fn execute(command: &Command, argv: &[String]) -> Result<()> {
    let mut run = Run::default();
    let out_dir = match command {
        Command::Subsample(a) => {
            subsample(a, &mut run)?;
            &a.out
        }
        Command::Augment(a) => {
            augment(a, &mut run)?;
            &a.out
        }
        Command::Audit(a) => {
            audit(a, &mut run)?;
            &a.out_dir
        }
        Command::Bench(a) => {
            bench(a, &mut run)?;
            &a.out
        }
    };
    let manifest = RunManifest {
        command: command.name().to_string(),
        argv: argv.to_vec(),
        cwd: std::env::current_dir()?,
        config: serde_json::to_value(command)?,
        seeds: run.seeds,
        replay_mode: run.provider.as_ref().map(|p| p.mode().to_string()),
        cassette: match run.provider.as_ref().and_then(|p| p.cassette()).and_then(|c| c.path()) {
            Some(path) => Some(FileDigest::of(path)?),
            None => None,
        },
        outputs: run
            .outputs
            .iter()
            .map(|p| FileDigest::of(p))
            .collect::<Result<_>>()?,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    manifest.write(&out_dir.join(MANIFEST_FILE))
}

/// What a command produced, for its manifest.
#[derive(Default)]
struct Run {
    seeds: BTreeMap<String, u64>,
    outputs: Vec<PathBuf>,
    provider: Option<Arc<Provider>>,
}

impl Run {
    fn write(&mut self, path: PathBuf, content: &str) -> Result<()> {
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path);
        Ok(())
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_format(s: &Option<String>) -> Result<Option<Format>> {
    s.as_deref()
        .map(|f| f.parse::<Format>().map_err(|e| usage(e.to_string())))
        .transpose()
}

fn load(path: &Path, format: &Option<String>) -> Result<DatasetBundle> {
    corpus::load_path(path, parse_format(format)?).with_context(|| format!("loading {}", path.display()))
}

fn make_provider(args: &ProviderArgs) -> Result<Arc<Provider>> {
    let mut cfg = ProviderConfig::from_env()?;
    if let Some(mode) = args.replay_mode {
        cfg.mode = mode;
    }
    if let Some(c) = &args.cassette {
        cfg.cassette = Some(c.clone());
    }
    if let Some(rps) = args.rps {
        cfg.requests_per_second = rps;
    }
    Ok(Arc::new(Provider::from_config(&cfg)?))
}

fn catalog(path: &Option<PathBuf>) -> Result<PromptCatalog> {
    match path {
        Some(p) => Ok(PromptCatalog::from_file(p)?),
        None => Ok(PromptCatalog::standard()),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_recipe(
    method: AugmentMethod,
    k: usize,
    alpha: f64,
    seed: u64,
    pivots: &[String],
    prompts: &Option<PathBuf>,
    task: &str,
    per_call: usize,
) -> Result<AugmentationRecipe> {
    let mut recipe = match method {
        AugmentMethod::Eda => AugmentationRecipe::eda(k, alpha, seed),
        AugmentMethod::BackTranslation => {
            if pivots.is_empty() {
                return Err(usage("--method backtrans needs --pivots"));
            }
            AugmentationRecipe::back_translation(k, pivots.to_vec(), seed)
        }
        AugmentMethod::LlmZeroShot => {
            let templates = catalog(prompts)?.zero_shot(task);
            if templates.is_empty() {
                return Err(usage(format!("the prompt catalog has no zero-shot prompts for task `{task}`; pass --task")));
            }
            AugmentationRecipe::zero_shot(k, templates, seed)
        }
        AugmentMethod::LlmFewShot => {
            let template = catalog(prompts)?
                .few_shot(task)
                .ok_or_else(|| usage("the prompt catalog has no paraphrase template"))?;
            AugmentationRecipe::few_shot(k, template, seed)
        }
    };
    recipe.per_call = per_call;
    recipe.validate().map_err(|e| usage(e.to_string()))?;
    Ok(recipe)
}

fn subsample(a: &SubsampleArgs, run: &mut Run) -> Result<()> {
    let bundle = load(&a.input, &a.format)?;
    let spec = SubsampleSpec::new(a.per_class, a.seed).map_err(|e| usage(e.to_string()))?;
    let sub = corpus::subsample(&bundle, &spec)?;
    let format = parse_format(&a.format)?
        .or_else(|| Format::from_path(&a.input))
        .unwrap_or(Format::Jsonl);
    run.seeds.insert("subsample".into(), a.seed);
    run.outputs = corpus::save_dataset_dir(&sub, &a.out, format)?;
    Ok(())
}

fn augment(a: &AugmentArgs, run: &mut Run) -> Result<()> {
    let method: AugmentMethod = a.method.parse().map_err(|e: synthaug::augment::AugmentError| usage(e.to_string()))?;
    let bundle = load(&a.input, &a.format)?;
    let task = a.task.clone().unwrap_or_else(|| bundle.task_name.clone());
    let recipe = build_recipe(method, a.k, a.alpha, a.seed, &a.pivots, &a.prompts, &task, a.per_call)?;
    if a.total.is_some() && method != AugmentMethod::LlmZeroShot {
        return Err(usage("--total only applies to --method llm-zero"));
    }
    let provider = if method.needs_provider() {
        Some(make_provider(&a.provider)?)
    } else {
        None
    };
    let thesaurus = Thesaurus::standard();
    let stoplist = Stoplist::standard();
    let ctx = AugmentContext {
        thesaurus: &thesaurus,
        stoplist: &stoplist,
        provider: provider.as_deref(),
    };
    let generated = match (a.total, &provider) {
        (Some(total), Some(p)) => {
            let cfg = ZeroShotConfig {
                total_per_label: total,
                per_call: a.per_call,
                seed: a.seed,
            };
            llm_zero_shot(&cfg, &bundle.labels, recipe.prompts.as_deref().unwrap_or_default(), p)?
        }
        _ => apply_recipe(&recipe, &bundle.train, &bundle.labels, &ctx)?,
    };
    fs::create_dir_all(&a.out)?;
    let path = a.out.join("generated.jsonl");
    corpus::save_examples(&generated, Split::Train, &path, Format::Jsonl)?;
    run.outputs.push(path);
    run.seeds.insert("augment".into(), a.seed);
    run.provider = provider;
    log::info!("{} generated examples", generated.len());
    Ok(())
}

fn audit(a: &AuditArgs, run: &mut Run) -> Result<()> {
    let metrics: Vec<MetricKind> = a
        .metrics
        .iter()
        .map(|m| m.parse().map_err(|e: similarity::SimilarityError| usage(e.to_string())))
        .collect::<Result<_>>()?;
    let bundle = match (&a.dataset, &a.train, &a.test) {
        (Some(d), _, _) => corpus::load_path(d, None)?,
        (None, Some(train), Some(test)) => {
            let tr = load_flat(train)?;
            let te = load_flat(test)?;
            DatasetBundle::new("audit", tr, Vec::new(), te)?
        }
        _ => return Err(usage("pass --dataset or both --train and --test")),
    };
    let generated = match &a.generated {
        Some(g) => load_flat(g)?,
        None => Vec::new(),
    };
    let stoplist = match &a.stopwords {
        Some(p) => Stoplist::from_file(p)?,
        None => Stoplist::standard(),
    };
    let hash = HashEmbedder::new(stoplist.clone());
    let provider_embedder;
    let embedder: Option<&dyn Embedder> = if !metrics.contains(&MetricKind::EmbeddingCosine) {
        None
    } else {
        match a.embedder.as_str() {
            "hash" => Some(&hash),
            "provider" => {
                let provider = make_provider(&a.provider)?;
                provider_embedder = ProviderEmbedder::new(Arc::clone(&provider));
                run.provider = Some(provider);
                Some(&provider_embedder)
            }
            other => return Err(usage(format!("unknown embedder `{other}` (expected hash or provider)"))),
        }
    };
    let mut res = AuditResources::new(&stoplist);
    res.embedder = embedder;
    let entries = similarity::audit(&bundle, &generated, &metrics, &res)?;
    fs::create_dir_all(&a.out_dir)?;
    run.write(a.out_dir.join("audit.csv"), &similarity::audit_csv(&entries))?;
    let overlap: Vec<serde_json::Value> = entries
        .iter()
        .filter(|e| e.report.metric == MetricKind::WordOverlap)
        .map(|e| Ok(serde_json::json!({"pair": e.pair, "stats": similarity::overlap_stats(&e.report)?})))
        .collect::<Result<_, similarity::SimilarityError>>()?;
    let json = serde_json::json!({"reports": entries, "overlap_stats": overlap});
    run.write(a.out_dir.join("audit.json"), &(serde_json::to_string_pretty(&json)? + "\n"))?;
    run.write(a.out_dir.join("audit.md"), &similarity::audit_markdown(&bundle.task_name, &entries))?;
    Ok(())
}

fn load_flat(path: &Path) -> Result<Vec<LabeledExample>> {
    let format = Format::from_path(path).ok_or_else(|| usage(format!("cannot tell the format of {}", path.display())))?;
    corpus::load_examples(path, format).with_context(|| format!("loading {}", path.display()))
}

fn bench(a: &BenchArgs, run: &mut Run) -> Result<()> {
    let bundle = load(&a.input, &a.format)?;
    let task = a.task.clone().unwrap_or_else(|| bundle.task_name.clone());
    let mut methods: Vec<Option<AugmentMethod>> = Vec::new();
    for m in &a.methods {
        methods.push(match m.as_str() {
            "no-aug" | "none" => None,
            other => Some(other.parse().map_err(|e: synthaug::augment::AugmentError| usage(e.to_string()))?),
        });
    }
    if a.no_train_data && methods != [Some(AugmentMethod::LlmZeroShot)] {
        return Err(usage("--no-train-data runs --methods llm-zero only"));
    }
    let recipes: Vec<Option<AugmentationRecipe>> = methods
        .iter()
        .map(|m| {
            m.map(|m| build_recipe(m, a.k, a.alpha, a.seed, &a.pivots, &a.prompts, &task, a.per_call))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let provider = if methods.iter().flatten().any(|m| m.needs_provider()) {
        Some(make_provider(&a.provider)?)
    } else {
        None
    };
    let thesaurus = Thesaurus::standard();
    let stoplist = Stoplist::standard();
    let ctx = AugmentContext {
        thesaurus: &thesaurus,
        stoplist: &stoplist,
        provider: provider.as_deref(),
    };
    let config = ExperimentConfig {
        per_class: a.per_class,
        repetitions: a.reps,
        base_seed: a.seed,
        train: TrainConfig {
            epochs: a.epochs,
            learning_rate: a.lr,
            l2: a.l2,
            seed: a.seed,
            early_stop_on_dev: true,
        },
    };
    run.seeds.insert("base".into(), a.seed);

    let results: Vec<ExperimentResult> = if a.no_train_data {
        let recipe = recipes[0].as_ref().expect("llm-zero recipe");
        vec![evalbench::run_no_train_scenario(&bundle, recipe, a.generated_per_class, &ctx, &config)?]
    } else if let Some(ks) = &a.sweep_k {
        if ks.is_empty() || ks.contains(&0) {
            return Err(usage("--sweep-k values must be positive"));
        }
        let augmenting: Vec<AugmentationRecipe> = recipes.iter().flatten().cloned().collect();
        if augmenting.len() < recipes.len() {
            log::warn!("no-aug has no K and is left out of the sweep");
        }
        evalbench::sweep_k(&bundle, &augmenting, ks, &ctx, &config).map_err(|e| match e {
            evalbench::EvalError::Augment(synthaug::augment::AugmentError::InvalidRecipe(m)) => usage(m),
            other => other.into(),
        })?
    } else {
        recipes
            .iter()
            .map(|r| evalbench::run_experiment(&bundle, r.as_ref(), &ctx, &config))
            .collect::<Result<_, _>>()?
    };

    fs::create_dir_all(&a.out)?;
    run.write(a.out.join("results.csv"), &evalbench::per_rep_csv(&results))?;
    run.write(a.out.join("aggregate.csv"), &evalbench::aggregate_csv(&results))?;
    run.write(a.out.join("report.md"), &evalbench::results_markdown(&results))?;
    run.write(a.out.join("results.json"), &(serde_json::to_string_pretty(&results)? + "\n"))?;
    if a.sweep_k.is_some() {
        run.write(a.out.join("sweep.csv"), &evalbench::sweep_csv(&results))?;
    }
    run.provider = provider;
    Ok(())
}
