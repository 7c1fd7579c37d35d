//! External services (chat completion, translation, sentence embedding)
//! behind one gateway that can record every call to a cassette and replay
//! it offline.
//!
//! A [`Provider`] runs in one of three [`ReplayMode`]s:
//!
//! * `Record`: call the service and append a [`ProviderCallRecord`] per call,
//! * `Replay`: answer only from the cassette; a miss is an error and no
//!   transport is ever constructed,
//! * `Passthrough`: call the service without recording.
//!
//! Requests are matched by fingerprint: the SHA-256 of the provider kind and
//! the request serialized with sorted keys and whitespace-collapsed strings.

mod cassette;
mod embed;
mod http;
mod retry;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cassette::{Cassette, ProviderCallRecord};
pub use embed::{builtin_hash_embedder, Embedder, HashEmbedder, ProviderEmbedder, HASH_EMBEDDING_DIM};
pub use http::{HttpTransport, Transport, TransportError};
pub use retry::{RateLimiter, RetryPolicy};

pub const ENV_API_KEY: &str = "AUG_API_KEY";
pub const ENV_BASE_URL: &str = "AUG_API_BASE_URL";
pub const ENV_CASSETTE: &str = "AUG_CASSETTE";
pub const ENV_REPLAY_MODE: &str = "AUG_REPLAY_MODE";

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("cassette miss for {kind} request {fingerprint}")]
    CassetteMiss { kind: ProviderKind, fingerprint: String },
    #[error("giving up after {attempts} attempts (last status {}): {message}", status.map(|s| s.to_string()).unwrap_or_else(|| "none".into()))]
    RetriesExhausted {
        attempts: u32,
        status: Option<u16>,
        message: String,
    },
    #[error("request failed (status {}): {message}", status.map(|s| s.to_string()).unwrap_or_else(|| "none".into()))]
    Request { status: Option<u16>, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("malformed response: {0}")]
    BadResponse(String),
    #[error("embedding {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize, index: usize },
    #[error("failed after {completed} of {total} items: {source}")]
    Partial {
        completed: usize,
        total: usize,
        #[source]
        source: Box<ProviderError>,
    },
    #[error("cassette {path}: {message}")]
    Cassette { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, ProviderError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Chat,
    Translate,
    Embed,
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProviderKind::Chat => "chat",
            ProviderKind::Translate => "translate",
            ProviderKind::Embed => "embed",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplayMode {
    Record,
    #[default]
    Replay,
    Passthrough,
}

impl FromStr for ReplayMode {
    type Err = ProviderError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "record" => Ok(ReplayMode::Record),
            "replay" => Ok(ReplayMode::Replay),
            "passthrough" => Ok(ReplayMode::Passthrough),
            other => Err(ProviderError::Config(format!(
                "unknown replay mode `{other}` (expected record, replay or passthrough)"
            ))),
        }
    }
}

impl fmt::Display for ReplayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReplayMode::Record => "record",
            ReplayMode::Replay => "replay",
            ReplayMode::Passthrough => "passthrough",
        })
    }
}

pub const DEFAULT_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub prompt: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub model_id: String,
    /// Sampling seed forwarded to the service; also keeps repeated prompts distinguishable in a cassette.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChatRequest {
    pub fn new(prompt: impl Into<String>, model_id: impl Into<String>) -> Self {
        ChatRequest {
            prompt: prompt.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            model_id: model_id.into(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.prompt.trim().is_empty() {
            return Err(ProviderError::InvalidRequest("empty prompt".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ProviderError::InvalidRequest(format!("temperature {} < 0", self.temperature)));
        }
        if self.max_output_tokens == 0 {
            return Err(ProviderError::InvalidRequest("max_output_tokens must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub text: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub model_id: String,
    pub texts: Vec<String>,
}

/// Two lowercase ASCII letters, e.g. `en`, `de`.
pub fn validate_lang(code: &str) -> Result<()> {
    if code.len() == 2 && code.bytes().all(|b| b.is_ascii_lowercase()) {
        Ok(())
    } else {
        Err(ProviderError::InvalidRequest(format!("`{code}` is not a two-letter language code")))
    }
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn write_canonical(value: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(v, out);
            }
            out.push(']');
        }
        Value::String(s) => out.push_str(&Value::String(normalize_ws(s)).to_string()),
        other => out.push_str(&other.to_string()),
    }
}

/// Canonical text form of a request: sorted keys, no insignificant
/// whitespace, string values trimmed with internal whitespace collapsed.
pub fn canonicalize(value: &serde_json::Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

/// Lowercase hex SHA-256 over `<kind>\n<canonical request>`.
pub fn fingerprint(kind: ProviderKind, request: &serde_json::Value) -> String {
    let mut hasher = Sha256::new();
    hasher.update(kind.to_string().as_bytes());
    hasher.update(b"\n");
    hasher.update(canonicalize(request).as_bytes());
    hex::encode(hasher.finalize())
}

/// Settings for building a [`Provider`]; see [`ProviderConfig::from_env`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub mode: ReplayMode,
    pub cassette: Option<PathBuf>,
    #[serde(skip)]
    pub api_key: Option<String>,
    pub base_url: String,
    pub chat_url: Option<String>,
    pub translate_url: Option<String>,
    pub embed_url: Option<String>,
    pub chat_model: String,
    pub embed_model: String,
    pub requests_per_second: f64,
    pub retry: RetryPolicy,
    pub timeout_secs: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            mode: ReplayMode::Replay,
            cassette: None,
            api_key: None,
            base_url: "http://127.0.0.1:8080/v1".into(),
            chat_url: None,
            translate_url: None,
            embed_url: None,
            chat_model: "gpt-3.5-turbo".into(),
            embed_model: "all-MiniLM-L6-v2".into(),
            requests_per_second: 1.0,
            retry: RetryPolicy::default(),
            timeout_secs: 120,
        }
    }
}

impl ProviderConfig {
    /// Defaults overridden by `AUG_API_KEY`, `AUG_API_BASE_URL`, `AUG_CASSETTE` and `AUG_REPLAY_MODE`.
    pub fn from_env() -> Result<Self> {
        let mut cfg = ProviderConfig::default();
        if let Ok(key) = std::env::var(ENV_API_KEY) {
            if !key.is_empty() {
                cfg.api_key = Some(key);
            }
        }
        if let Ok(url) = std::env::var(ENV_BASE_URL) {
            if !url.is_empty() {
                cfg.base_url = url;
            }
        }
        if let Ok(path) = std::env::var(ENV_CASSETTE) {
            if !path.is_empty() {
                cfg.cassette = Some(PathBuf::from(path));
            }
        }
        if let Ok(mode) = std::env::var(ENV_REPLAY_MODE) {
            if !mode.is_empty() {
                cfg.mode = mode.parse()?;
            }
        }
        Ok(cfg)
    }

    fn endpoint(&self, explicit: &Option<String>, suffix: &str) -> String {
        explicit
            .clone()
            .unwrap_or_else(|| format!("{}/{}", self.base_url.trim_end_matches('/'), suffix))
    }

    pub fn chat_endpoint(&self) -> String {
        self.endpoint(&self.chat_url, "chat/completions")
    }

    pub fn translate_endpoint(&self) -> String {
        self.endpoint(&self.translate_url, "translate")
    }

    pub fn embed_endpoint(&self) -> String {
        self.endpoint(&self.embed_url, "embeddings")
    }
}

/// Gateway to the external services. Safe to share across threads.
pub struct Provider {
    mode: ReplayMode,
    cassette: Option<Arc<Cassette>>,
    transport: Option<Box<dyn Transport>>,
    retry: RetryPolicy,
    limiter: Option<RateLimiter>,
    chat_model: String,
    embed_model: String,
}

impl fmt::Debug for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Provider")
            .field("mode", &self.mode)
            .field("cassette", &self.cassette.as_ref().and_then(|c| c.path().map(|p| p.to_path_buf())))
            .field("live", &self.transport.is_some())
            .finish()
    }
}

impl Provider {
    /// Cassette-only provider. Never touches the network.
    pub fn replay(cassette: Arc<Cassette>) -> Self {
        let defaults = ProviderConfig::default();
        Provider {
            mode: ReplayMode::Replay,
            cassette: Some(cassette),
            transport: None,
            retry: RetryPolicy::default(),
            limiter: None,
            chat_model: defaults.chat_model,
            embed_model: defaults.embed_model,
        }
    }

    /// Live provider over an explicit transport. `Record` needs a cassette.
    pub fn live(
        mode: ReplayMode,
        transport: Box<dyn Transport>,
        cassette: Option<Arc<Cassette>>,
        retry: RetryPolicy,
        limiter: Option<RateLimiter>,
    ) -> Result<Self> {
        match mode {
            ReplayMode::Replay => {
                return Err(ProviderError::Config(
                    "replay mode takes no transport; use Provider::replay".into(),
                ))
            }
            ReplayMode::Record if cassette.is_none() => {
                return Err(ProviderError::Config("record mode needs a cassette".into()))
            }
            _ => {}
        }
        let defaults = ProviderConfig::default();
        Ok(Provider {
            mode,
            cassette,
            transport: Some(transport),
            retry,
            limiter,
            chat_model: defaults.chat_model,
            embed_model: defaults.embed_model,
        })
    }

    pub fn from_config(cfg: &ProviderConfig) -> Result<Self> {
        let mut provider = match cfg.mode {
            ReplayMode::Replay => {
                let path = cfg
                    .cassette
                    .as_ref()
                    .ok_or_else(|| ProviderError::Config("replay mode needs a cassette".into()))?;
                Provider::replay(Arc::new(Cassette::load(path)?))
            }
            ReplayMode::Record | ReplayMode::Passthrough => {
                let cassette = match (&cfg.cassette, cfg.mode) {
                    (Some(path), ReplayMode::Record) => Some(Arc::new(Cassette::open_for_record(path)?)),
                    (None, ReplayMode::Record) => {
                        return Err(ProviderError::Config("record mode needs a cassette".into()))
                    }
                    _ => None,
                };
                let transport = HttpTransport::new(cfg)?;
                let limiter = (cfg.requests_per_second > 0.0).then(|| RateLimiter::new(cfg.requests_per_second));
                Provider::live(cfg.mode, Box::new(transport), cassette, cfg.retry.clone(), limiter)?
            }
        };
        provider.chat_model = cfg.chat_model.clone();
        provider.embed_model = cfg.embed_model.clone();
        Ok(provider)
    }

    pub fn with_models(mut self, chat_model: impl Into<String>, embed_model: impl Into<String>) -> Self {
        self.chat_model = chat_model.into();
        self.embed_model = embed_model.into();
        self
    }

    pub fn mode(&self) -> ReplayMode {
        self.mode
    }

    pub fn chat_model(&self) -> &str {
        &self.chat_model
    }

    pub fn cassette(&self) -> Option<&Arc<Cassette>> {
        self.cassette.as_ref()
    }

    fn call<F>(&self, kind: ProviderKind, request: serde_json::Value, live: F) -> Result<String>
    where
        F: Fn(&dyn Transport) -> std::result::Result<String, TransportError>,
    {
        let fp = fingerprint(kind, &request);
        match self.mode {
            ReplayMode::Replay => {
                let cassette = self
                    .cassette
                    .as_ref()
                    .ok_or_else(|| ProviderError::Config("replay mode needs a cassette".into()))?;
                cassette
                    .lookup(&fp)
                    .map(str::to_string)
                    .ok_or(ProviderError::CassetteMiss { kind, fingerprint: fp })
            }
            ReplayMode::Record | ReplayMode::Passthrough => {
                let transport = self
                    .transport
                    .as_deref()
                    .ok_or_else(|| ProviderError::Config("no transport configured".into()))?;
                if let Some(limiter) = &self.limiter {
                    limiter.acquire();
                }
                let response = self.retry.run(|| live(transport))?;
                if self.mode == ReplayMode::Record {
                    if let Some(cassette) = &self.cassette {
                        cassette.append(ProviderCallRecord::new(kind, request, response.clone()))?;
                    }
                }
                Ok(response)
            }
        }
    }

    pub fn chat_complete(&self, req: &ChatRequest) -> Result<String> {
        req.validate()?;
        let json = serde_json::to_value(req).expect("chat request serializes");
        self.call(ProviderKind::Chat, json, |t| t.chat(req))
    }

    /// Translates `text`; returns it unchanged without any call when `source == target`.
    pub fn translate(&self, text: &str, source: &str, target: &str) -> Result<String> {
        validate_lang(source)?;
        validate_lang(target)?;
        if source == target {
            return Ok(text.to_string());
        }
        let req = TranslateRequest {
            text: text.to_string(),
            source: source.to_string(),
            target: target.to_string(),
        };
        let json = serde_json::to_value(&req).expect("translate request serializes");
        self.call(ProviderKind::Translate, json, |t| t.translate(&req))
    }

    /// One vector per text, all of the same dimension.
    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        if texts.is_empty() {
            return Err(ProviderError::InvalidRequest("empty embedding batch".into()));
        }
        let req = EmbedRequest {
            model_id: self.embed_model.clone(),
            texts: texts.to_vec(),
        };
        let json = serde_json::to_value(&req).expect("embed request serializes");
        let raw = self.call(ProviderKind::Embed, json, |t| {
            t.embed(&req).map(|v| serde_json::to_string(&v).expect("vectors serialize"))
        })?;
        let vectors: Vec<Vec<f64>> =
            serde_json::from_str(&raw).map_err(|e| ProviderError::BadResponse(e.to_string()))?;
        check_embeddings(texts.len(), &vectors)?;
        Ok(vectors)
    }
}

fn check_embeddings(expected_len: usize, vectors: &[Vec<f64>]) -> Result<()> {
    if vectors.len() != expected_len {
        return Err(ProviderError::BadResponse(format!(
            "{} embeddings for {} texts",
            vectors.len(),
            expected_len
        )));
    }
    let dim = vectors[0].len();
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(ProviderError::DimensionMismatch {
                expected: dim,
                got: v.len(),
                index,
            });
        }
    }
    Ok(())
}
