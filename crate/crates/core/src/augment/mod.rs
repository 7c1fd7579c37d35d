//! Augmentation methods: EDA, back-translation, zero-shot class prompting
//! and few-shot paraphrasing.

mod eda;
mod llm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eda::{
    eda_augment, random_deletion, random_insertion, random_swap, synonym_replacement, EdaOp, EdaParams, Thesaurus,
};
pub use llm::{
    back_translate, llm_few_shot, llm_zero_shot, parse_generated_list, render_prompt, PromptCatalog, PromptMode,
    PromptTemplate, ZeroShotConfig, DEFAULT_FEW_SHOT_TEMPLATE, DEFAULT_PER_CALL, MAX_SHORTFALL_ROUNDS,
};

use crate::corpus::{CorpusError, LabeledExample};
use crate::providers::{Provider, ProviderError};
use crate::textkit::Stoplist;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("prompt `{id}`: {message}")]
    Template { id: String, message: String },
    #[error("prompt catalog: {0}")]
    Catalog(String),
    #[error("thesaurus: {0}")]
    Thesaurus(String),
    #[error("no prompt for label `{label}`")]
    MissingPrompt { label: String },
    #[error("no items could be parsed from the response: {raw:?}")]
    EmptyParse { raw: String },
    #[error("nothing parseable was generated for label `{label}`; last response: {raw:?}")]
    ParseFailure { label: String, raw: String },
    #[error("{method} needs a provider")]
    NoProvider { method: AugmentMethod },
    #[error("pivot `{pivot}` failed after {} outputs: {source}", completed.len())]
    Partial {
        completed: Vec<LabeledExample>,
        pivot: String,
        #[source]
        source: Box<AugmentError>,
    },
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, AugmentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AugmentMethod {
    #[serde(rename = "eda")]
    Eda,
    #[serde(rename = "backtrans")]
    BackTranslation,
    #[serde(rename = "llm-zero")]
    LlmZeroShot,
    #[serde(rename = "llm-few")]
    LlmFewShot,
}

impl AugmentMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AugmentMethod::Eda => "eda",
            AugmentMethod::BackTranslation => "backtrans",
            AugmentMethod::LlmZeroShot => "llm-zero",
            AugmentMethod::LlmFewShot => "llm-few",
        }
    }

    pub fn needs_provider(self) -> bool {
        self != AugmentMethod::Eda
    }
}

impl fmt::Display for AugmentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AugmentMethod {
    type Err = AugmentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eda" => Ok(AugmentMethod::Eda),
            "backtrans" | "back-translation" => Ok(AugmentMethod::BackTranslation),
            "llm-zero" | "llm-zero-shot" => Ok(AugmentMethod::LlmZeroShot),
            "llm-few" | "llm-few-shot" => Ok(AugmentMethod::LlmFewShot),
            other => Err(AugmentError::InvalidRecipe(format!(
                "unknown method `{other}` (expected eda, backtrans, llm-zero or llm-few)"
            ))),
        }
    }
}

/// One augmentation configuration.
///
/// `k` is the number of generated examples per original training example;
/// for zero-shot generation without training data it is the count per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecipe {
    pub method: AugmentMethod,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eda: Option<EdaParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot_langs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompts: Option<Vec<PromptTemplate>>,
    pub seed: u64,
    /// Items requested per chat call.
    #[serde(default = "default_per_call")]
    pub per_call: usize,
}

fn default_per_call() -> usize {
    DEFAULT_PER_CALL
}

impl AugmentationRecipe {
    pub fn eda(k: usize, alpha: f64, seed: u64) -> Self {
        AugmentationRecipe {
            method: AugmentMethod::Eda,
            k,
            eda: Some(EdaParams { alpha, seed }),
            pivot_langs: None,
            prompts: None,
            seed,
            per_call: DEFAULT_PER_CALL,
        }
    }

    pub fn back_translation(k: usize, pivots: Vec<String>, seed: u64) -> Self {
        AugmentationRecipe {
            method: AugmentMethod::BackTranslation,
            pivot_langs: Some(pivots),
            ..Self::bare(AugmentMethod::BackTranslation, k, seed)
        }
    }

    pub fn zero_shot(k: usize, prompts: Vec<PromptTemplate>, seed: u64) -> Self {
        AugmentationRecipe {
            prompts: Some(prompts),
            ..Self::bare(AugmentMethod::LlmZeroShot, k, seed)
        }
    }

    pub fn few_shot(k: usize, template: PromptTemplate, seed: u64) -> Self {
        AugmentationRecipe {
            prompts: Some(vec![template]),
            ..Self::bare(AugmentMethod::LlmFewShot, k, seed)
        }
    }

    fn bare(method: AugmentMethod, k: usize, seed: u64) -> Self {
        AugmentationRecipe {
            method,
            k,
            eda: None,
            pivot_langs: None,
            prompts: None,
            seed,
            per_call: DEFAULT_PER_CALL,
        }
    }

    /// Same recipe with every seed replaced.
    pub fn reseeded(&self, seed: u64) -> Self {
        let mut r = self.clone();
        r.seed = seed;
        if let Some(e) = r.eda.as_mut() {
            e.seed = seed;
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(AugmentError::InvalidRecipe(m));
        if self.k == 0 {
            return bad("K must be positive".into());
        }
        if self.per_call == 0 {
            return bad("per-call count must be positive".into());
        }
        let (needs_eda, needs_pivots, needs_prompts) = match self.method {
            AugmentMethod::Eda => (true, false, false),
            AugmentMethod::BackTranslation => (false, true, false),
            AugmentMethod::LlmZeroShot | AugmentMethod::LlmFewShot => (false, false, true),
        };
        for (name, needed, present) in [
            ("eda parameters", needs_eda, self.eda.is_some()),
            ("pivot languages", needs_pivots, self.pivot_langs.is_some()),
            ("prompts", needs_prompts, self.prompts.is_some()),
        ] {
            if needed != present {
                let verb = if needed { "requires" } else { "does not take" };
                return bad(format!("{} {verb} {name}", self.method));
            }
        }
        if let Some(e) = &self.eda {
            e.validate()?;
        }
        if let Some(p) = &self.pivot_langs {
            if p.len() < self.k {
                return bad(format!("back-translation with K = {} needs {} pivot languages, got {}", self.k, self.k, p.len()));
            }
            for lang in p {
                crate::providers::validate_lang(lang)?;
            }
        }
        if let Some(prompts) = &self.prompts {
            for t in prompts {
                t.validate()?;
            }
            let want = match self.method {
                AugmentMethod::LlmZeroShot => PromptMode::ZeroShotClass,
                _ => PromptMode::FewShotParaphrase,
            };
            if prompts.is_empty() || prompts.iter().any(|t| t.mode != want) {
                return bad(format!("{} needs {want:?} prompts", self.method));
            }
        }
        Ok(())
    }
}

/// Shared resources for [`apply_recipe`].
#[derive(Clone, Copy)]
pub struct AugmentContext<'a> {
    pub thesaurus: &'a Thesaurus,
    pub stoplist: &'a Stoplist,
    pub provider: Option<&'a Provider>,
}

/// Generated examples for `train` under `recipe`.
///
/// Zero-shot generation asks for `k` times each label's training count, or
/// `k` per label when `train` is empty.
pub fn apply_recipe(
    recipe: &AugmentationRecipe,
    train: &[LabeledExample],
    labels: &[String],
    ctx: &AugmentContext<'_>,
) -> Result<Vec<LabeledExample>> {
    recipe.validate()?;
    let provider = || ctx.provider.ok_or(AugmentError::NoProvider { method: recipe.method });
    match recipe.method {
        AugmentMethod::Eda => {
            let params = recipe.eda.expect("validated");
            Ok(train
                .iter()
                .flat_map(|e| eda_augment(e, &params, recipe.k, ctx.thesaurus, ctx.stoplist))
                .collect())
        }
        AugmentMethod::BackTranslation => {
            let provider = provider()?;
            let pivots = recipe.pivot_langs.as_deref().expect("validated");
            let mut out = Vec::new();
            for e in train {
                out.extend(back_translate(e, pivots, recipe.k, provider)?);
            }
            Ok(out)
        }
        AugmentMethod::LlmZeroShot => {
            let provider = provider()?;
            let prompts = recipe.prompts.as_deref().expect("validated");
            let mut out = Vec::new();
            for label in labels {
                let count = train.iter().filter(|e| &e.label == label).count();
                let total = if train.is_empty() { recipe.k } else { recipe.k * count };
                let cfg = ZeroShotConfig {
                    total_per_label: total,
                    per_call: recipe.per_call,
                    seed: recipe.seed,
                };
                out.extend(llm_zero_shot(&cfg, std::slice::from_ref(label), prompts, provider)?);
            }
            Ok(out)
        }
        AugmentMethod::LlmFewShot => {
            let provider = provider()?;
            let template = &recipe.prompts.as_deref().expect("validated")[0];
            llm_few_shot(train, recipe.k, template, provider, recipe.seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recipe_validation() {
        assert!(AugmentationRecipe::eda(1, 0.1, 0).validate().is_ok());
        assert!(AugmentationRecipe::eda(0, 0.1, 0).validate().is_err());
        let pivots: Vec<String> = ["de", "fr", "es", "ru"].iter().map(|s| s.to_string()).collect();
        assert!(AugmentationRecipe::back_translation(4, pivots.clone(), 0).validate().is_ok());
        let err = AugmentationRecipe::back_translation(8, pivots, 0).validate().unwrap_err();
        assert!(err.to_string().contains("needs 8 pivot languages"), "{err}");
        let mut r = AugmentationRecipe::eda(1, 0.1, 0);
        r.pivot_langs = Some(vec!["de".into()]);
        assert!(r.validate().is_err());
        let cat = PromptCatalog::standard();
        assert!(AugmentationRecipe::zero_shot(1, cat.zero_shot("sst2"), 0).validate().is_ok());
        assert!(AugmentationRecipe::few_shot(1, cat.get("sst2/positive").unwrap().clone(), 0)
            .validate()
            .is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            AugmentMethod::Eda,
            AugmentMethod::BackTranslation,
            AugmentMethod::LlmZeroShot,
            AugmentMethod::LlmFewShot,
        ] {
            assert_eq!(m.as_str().parse::<AugmentMethod>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
    }

    #[test]
    fn eda_recipe_without_provider() {
        let th = Thesaurus::standard();
        let stop = Stoplist::standard();
        let ctx = AugmentContext {
            thesaurus: &th,
            stoplist: &stop,
            provider: None,
        };
        let train = vec![LabeledExample::new("a", "a wonderful film", "pos").unwrap()];
        let out = apply_recipe(&AugmentationRecipe::eda(3, 0.1, 1), &train, &["pos".into()], &ctx).unwrap();
        assert_eq!(out.len(), 3);
        let zs = AugmentationRecipe::zero_shot(1, PromptCatalog::standard().zero_shot("sst2"), 0);
        assert!(matches!(
            apply_recipe(&zs, &train, &["pos".into()], &ctx),
            Err(AugmentError::NoProvider { .. })
        ));
    }
}
