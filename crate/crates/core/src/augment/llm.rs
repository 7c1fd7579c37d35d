use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AugmentError, Result};
use crate::corpus::{Generation, LabeledExample, Provenance};
use crate::providers::{ChatRequest, Provider};
use crate::resources;
use crate::rng::{derive_seed, fnv1a64};

/// Follow-up calls allowed per label (or per source sentence) when a
/// response parses to fewer items than requested.
pub const MAX_SHORTFALL_ROUNDS: usize = 3;
pub const DEFAULT_PER_CALL: usize = 20;
pub const DEFAULT_FEW_SHOT_TEMPLATE: &str =
    "Rephrase the following sentence {n} different ways, keeping the same meaning and label: {sentence}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMode {
    ZeroShotClass,
    FewShotParaphrase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub id: String,
    /// Task the prompt belongs to; `any` for task-independent templates.
    #[serde(default)]
    pub task: String,
    pub label: String,
    pub mode: PromptMode,
    pub template: String,
}

impl PromptTemplate {
    pub fn few_shot_default() -> Self {
        PromptTemplate {
            id: "paraphrase/default".into(),
            task: "any".into(),
            label: "*".into(),
            mode: PromptMode::FewShotParaphrase,
            template: DEFAULT_FEW_SHOT_TEMPLATE.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let need: &[&str] = match self.mode {
            PromptMode::ZeroShotClass => &["{n}"],
            PromptMode::FewShotParaphrase => &["{n}", "{sentence}"],
        };
        for p in need {
            if !self.template.contains(p) {
                return Err(AugmentError::Template {
                    id: self.id.clone(),
                    message: format!("template lacks the {p} placeholder"),
                });
            }
        }
        Ok(())
    }
}

/// Fills `{n}` and, for paraphrase templates, `{sentence}`.
pub fn render_prompt(template: &PromptTemplate, n: usize, sentence: Option<&str>) -> Result<String> {
    template.validate()?;
    let out = template.template.replace("{n}", &n.to_string());
    match template.mode {
        PromptMode::ZeroShotClass => Ok(out),
        PromptMode::FewShotParaphrase => {
            let sentence = sentence.ok_or_else(|| AugmentError::Template {
                id: template.id.clone(),
                message: "paraphrase template needs a sentence".into(),
            })?;
            Ok(out.replace("{sentence}", sentence))
        }
    }
}

/// The prompt catalog file: a JSON array of templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptCatalog {
    pub templates: Vec<PromptTemplate>,
}

impl PromptCatalog {
    pub fn parse(json: &str) -> Result<Self> {
        let templates: Vec<PromptTemplate> =
            serde_json::from_str(json).map_err(|e| AugmentError::Catalog(e.to_string()))?;
        for t in &templates {
            t.validate()?;
        }
        Ok(PromptCatalog { templates })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|source| AugmentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&content)
    }

    pub fn standard() -> Self {
        Self::parse(resources::PROMPT_CATALOG).expect("bundled prompt catalog parses")
    }

    pub fn get(&self, id: &str) -> Option<&PromptTemplate> {
        self.templates.iter().find(|t| t.id == id)
    }

    /// Zero-shot class prompts for `task`.
    pub fn zero_shot(&self, task: &str) -> Vec<PromptTemplate> {
        self.templates
            .iter()
            .filter(|t| t.mode == PromptMode::ZeroShotClass && t.task == task)
            .cloned()
            .collect()
    }

    /// Paraphrase template for `task`, falling back to a task-independent one.
    pub fn few_shot(&self, task: &str) -> Option<PromptTemplate> {
        let para = |t: &&PromptTemplate| t.mode == PromptMode::FewShotParaphrase;
        self.templates
            .iter()
            .filter(para)
            .find(|t| t.task == task)
            .or_else(|| self.templates.iter().filter(para).find(|t| t.task == "any"))
            .cloned()
    }
}

fn strip_marker(line: &str) -> &str {
    let t = line.trim_start();
    for bullet in ["- ", "* ", "• ", "•"] {
        if let Some(rest) = t.strip_prefix(bullet) {
            return rest;
        }
    }
    let digits = t.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        let rest = &t[digits..];
        if let Some(r) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
            return r;
        }
    }
    t
}

fn strip_quotes(s: &str) -> &str {
    for (open, close) in [('"', '"'), ('\'', '\''), ('\u{201c}', '\u{201d}'), ('\u{2018}', '\u{2019}')] {
        if s.chars().count() >= 2 && s.starts_with(open) && s.ends_with(close) {
            return s[open.len_utf8()..s.len() - close.len_utf8()].trim();
        }
    }
    s
}

fn clean_item(line: &str) -> String {
    let s = strip_marker(line.trim()).trim();
    let s = s.replace("**", "").replace('`', "");
    let s = s.trim_start_matches('#').trim();
    let s = strip_quotes(s);
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Splits an LLM list response into items.
///
/// Strips enumeration markers (`1.`, `1)`, `-`, `*`, `•`), markdown emphasis,
/// surrounding quotes and extra whitespace; drops empty lines and lines that
/// end in `:` (preambles such as "Here are 5 sentences:"); keeps the first of
/// exact duplicates.
pub fn parse_generated_list(response: &str, expected_n: usize) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    let items: Vec<String> = response
        .lines()
        .map(clean_item)
        .filter(|s| !s.is_empty() && !s.ends_with(':'))
        .filter(|s| seen.insert(s.clone()))
        .collect();
    if items.is_empty() {
        return Err(AugmentError::EmptyParse { raw: response.to_string() });
    }
    if items.len() != expected_n {
        log::debug!("parsed {} items, {} requested", items.len(), expected_n);
    }
    Ok(items)
}

/// Controls for label-conditioned generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroShotConfig {
    /// Examples wanted per label.
    pub total_per_label: usize,
    /// Items requested per call.
    pub per_call: usize,
    pub seed: u64,
}

fn call_seed(seed: u64, key: &str, call: usize) -> u64 {
    derive_seed(derive_seed(seed, fnv1a64(key.as_bytes())), call as u64)
}

/// Collects `total` distinct items from repeated calls: first the planned
/// `ceil(total / per_call)` batches, then up to three shortfall rounds.
fn collect_items(
    provider: &Provider,
    total: usize,
    per_call: usize,
    seed: u64,
    key: &str,
    prompt_for: impl Fn(usize) -> Result<String>,
) -> Result<(Vec<String>, bool, String)> {
    let per_call = per_call.max(1);
    let mut items: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    let mut last_raw = String::new();
    let planned = total.div_ceil(per_call);
    let mut call = 0;
    while items.len() < total && call < planned + MAX_SHORTFALL_ROUNDS {
        let want = per_call.min(total - items.len());
        let req = ChatRequest::new(prompt_for(want)?, provider.chat_model()).with_seed(call_seed(seed, key, call));
        call += 1;
        let raw = provider.chat_complete(&req)?;
        match parse_generated_list(&raw, want) {
            Ok(parsed) => {
                for item in parsed {
                    if items.len() < total && seen.insert(item.clone()) {
                        items.push(item);
                    }
                }
            }
            Err(_) => log::warn!("{key}: unparseable response on call {call}"),
        }
        last_raw = raw;
    }
    let short = items.len() < total;
    Ok((items, short, last_raw))
}

/// `total_per_label` generated examples per label from its class prompt.
///
/// Output is ordered by label then generation index. A label that is still
/// short after the follow-up rounds is accepted with a `shortfall` flag.
pub fn llm_zero_shot(
    config: &ZeroShotConfig,
    labels: &[String],
    prompts: &[PromptTemplate],
    provider: &Provider,
) -> Result<Vec<LabeledExample>> {
    let mut chosen = Vec::with_capacity(labels.len());
    for label in labels {
        let t = prompts
            .iter()
            .find(|t| &t.label == label && t.mode == PromptMode::ZeroShotClass)
            .ok_or_else(|| AugmentError::MissingPrompt { label: label.clone() })?;
        t.validate()?;
        chosen.push(t);
    }
    if config.total_per_label == 0 {
        return Ok(Vec::new());
    }
    let per_label: Vec<Result<Vec<LabeledExample>>> = labels
        .par_iter()
        .zip(&chosen)
        .map(|(label, template)| {
            let (items, short, raw) = collect_items(
                provider,
                config.total_per_label,
                config.per_call,
                config.seed,
                label,
                |n| render_prompt(template, n, None),
            )?;
            if items.is_empty() {
                return Err(AugmentError::ParseFailure { label: label.clone(), raw });
            }
            if short {
                log::warn!("label {label}: {} of {} examples generated", items.len(), config.total_per_label);
            }
            Ok(items
                .into_iter()
                .enumerate()
                .map(|(i, text)| LabeledExample {
                    id: format!("gen-{}-{i}", label),
                    text,
                    label: label.clone(),
                    provenance: Provenance::Generated(Generation {
                        method: "llm-zero-shot".into(),
                        seed: config.seed,
                        prompt_id: template.id.clone(),
                        source_id: None,
                        flags: if short { vec!["shortfall".into()] } else { Vec::new() },
                    }),
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per_label {
        out.extend(r?);
    }
    Ok(out)
}

fn same_text(a: &str, b: &str) -> bool {
    a.split_whitespace()
        .map(str::to_lowercase)
        .eq(b.split_whitespace().map(str::to_lowercase))
}

/// `k` paraphrases of every training example, labelled like their source.
pub fn llm_few_shot(
    train: &[LabeledExample],
    k: usize,
    template: &PromptTemplate,
    provider: &Provider,
    seed: u64,
) -> Result<Vec<LabeledExample>> {
    if template.mode != PromptMode::FewShotParaphrase {
        return Err(AugmentError::Template {
            id: template.id.clone(),
            message: "few-shot generation needs a paraphrase template".into(),
        });
    }
    template.validate()?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let per_source: Vec<Result<Vec<LabeledExample>>> = train
        .par_iter()
        .map(|src| {
            let (items, short, raw) = collect_items(provider, k, k, seed, &src.id, |n| {
                render_prompt(template, n, Some(&src.text))
            })?;
            if items.is_empty() {
                return Err(AugmentError::ParseFailure { label: src.label.clone(), raw });
            }
            Ok(items
                .into_iter()
                .enumerate()
                .map(|(i, text)| {
                    let mut flags = Vec::new();
                    if same_text(&text, &src.text) {
                        flags.push("duplicate-of-source".to_string());
                    }
                    if short {
                        flags.push("shortfall".to_string());
                    }
                    LabeledExample {
                        id: format!("{}-para{i}", src.id),
                        text,
                        label: src.label.clone(),
                        provenance: Provenance::Generated(Generation {
                            method: "llm-few-shot".into(),
                            seed,
                            prompt_id: template.id.clone(),
                            source_id: Some(src.id.clone()),
                            flags,
                        }),
                    }
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in per_source {
        out.extend(r?);
    }
    Ok(out)
}

/// Round trips through the first `k` pivot languages (English source).
///
/// A failing pivot yields [`AugmentError::Partial`] holding the outputs of
/// the pivots that succeeded before it.
pub fn back_translate(
    example: &LabeledExample,
    pivot_langs: &[String],
    k: usize,
    provider: &Provider,
) -> Result<Vec<LabeledExample>> {
    if k > pivot_langs.len() {
        return Err(AugmentError::InvalidRecipe(format!(
            "back-translation with K = {k} needs {k} pivot languages, got {}",
            pivot_langs.len()
        )));
    }
    let mut out = Vec::with_capacity(k);
    for (i, pivot) in pivot_langs.iter().take(k).enumerate() {
        let round_trip = provider
            .translate(&example.text, "en", pivot)
            .and_then(|fwd| provider.translate(&fwd, pivot, "en"));
        let text = match round_trip {
            Ok(t) if !t.trim().is_empty() => t.split_whitespace().collect::<Vec<_>>().join(" "),
            Ok(_) => {
                return Err(AugmentError::Partial {
                    completed: out,
                    pivot: pivot.clone(),
                    source: Box::new(AugmentError::EmptyParse { raw: String::new() }),
                })
            }
            Err(e) => {
                return Err(AugmentError::Partial {
                    completed: out,
                    pivot: pivot.clone(),
                    source: Box::new(e.into()),
                })
            }
        };
        let flags = if same_text(&text, &example.text) {
            vec!["duplicate-of-source".to_string()]
        } else {
            Vec::new()
        };
        out.push(LabeledExample {
            id: format!("{}-bt{i}", example.id),
            text,
            label: example.label.clone(),
            provenance: Provenance::Generated(Generation {
                method: "backtrans".into(),
                seed: 0,
                prompt_id: pivot.clone(),
                source_id: Some(example.id.clone()),
                flags,
            }),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_catalog_prompts() {
        let cat = PromptCatalog::standard();
        let pos = cat.get("sst2/positive").unwrap();
        assert_eq!(
            render_prompt(pos, 20, None).unwrap(),
            "Generate 20 sentences that are positive reviews to a movie"
        );
        assert_eq!(
            render_prompt(pos, 5, None).unwrap(),
            "Generate 5 sentences that are positive reviews to a movie"
        );
        assert_eq!(cat.zero_shot("snips").len(), 7);
        assert_eq!(cat.zero_shot("trec").len(), 6);
        let para = cat.few_shot("sst2").unwrap();
        assert!(render_prompt(&para, 2, None).is_err());
        assert_eq!(
            render_prompt(&para, 2, Some("a fine film")).unwrap(),
            "Rephrase the following sentence 2 different ways, keeping the same meaning and label: a fine film"
        );
    }

    #[test]
    fn parses_lists() {
        assert_eq!(parse_generated_list("1. A\n2. B", 2).unwrap(), vec!["A", "B"]);
        assert_eq!(parse_generated_list("\"A\"\n\"A\"", 2).unwrap(), vec!["A"]);
        assert!(matches!(parse_generated_list("", 1), Err(AugmentError::EmptyParse { .. })));
        assert_eq!(
            parse_generated_list("Here are 3 sentences:\n\n1) **Play**  jazz\n- \u{201c}Rate it\u{201d}\n• Go", 3).unwrap(),
            vec!["Play jazz", "Rate it", "Go"]
        );
        // numbers that are not enumeration markers survive
        assert_eq!(parse_generated_list("1984 was a year", 1).unwrap(), vec!["1984 was a year"]);
    }

    #[test]
    fn template_validation() {
        let mut t = PromptTemplate::few_shot_default();
        t.template = "Rephrase {n} times".into();
        assert!(t.validate().is_err());
        assert!(PromptCatalog::parse(r#"[{"id":"x","label":"a","mode":"zero_shot_class","template":"no count"}]"#).is_err());
    }
}
