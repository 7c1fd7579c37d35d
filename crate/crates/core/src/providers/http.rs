//! Reference wire protocols.
//!
//! * chat: OpenAI-compatible `POST .../chat/completions` with a single user
//!   message; the reply is `choices[0].message.content`.
//! * translate: `POST .../translate` with `{"q", "source", "target", "format": "text"}`,
//!   reply `{"translatedText": "..."}`.
//! * embed: `POST .../embeddings` with `{"model", "input": [...]}`, reply
//!   `{"data": [{"index", "embedding": [...]}]}`.
//!
//! HTTP 429 and 5xx and connection failures are transient; other non-2xx
//! statuses and undecodable bodies are fatal.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{ChatRequest, EmbedRequest, ProviderConfig, ProviderError, TranslateRequest, ENV_API_KEY};

#[derive(Debug, Clone, PartialEq)]
pub enum TransportError {
    Transient { status: Option<u16>, message: String },
    Fatal { status: Option<u16>, message: String },
}

/// A live connection to the three services.
pub trait Transport: Send + Sync {
    fn chat(&self, req: &ChatRequest) -> Result<String, TransportError>;
    fn translate(&self, req: &TranslateRequest) -> Result<String, TransportError>;
    fn embed(&self, req: &EmbedRequest) -> Result<Vec<Vec<f64>>, TransportError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
    api_key: String,
    chat_url: String,
    translate_url: String,
    embed_url: String,
}

impl HttpTransport {
    pub fn new(cfg: &ProviderConfig) -> Result<Self, ProviderError> {
        let api_key = cfg
            .api_key
            .clone()
            .ok_or_else(|| ProviderError::Config(format!("{ENV_API_KEY} is not set")))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(HttpTransport {
            client,
            api_key,
            chat_url: cfg.chat_endpoint(),
            translate_url: cfg.translate_endpoint(),
            embed_url: cfg.embed_endpoint(),
        })
    }

    fn post<T: for<'de> Deserialize<'de>>(&self, url: &str, body: &serde_json::Value) -> Result<T, TransportError> {
        let resp = self
            .client
            .post(url)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| TransportError::Transient {
                status: e.status().map(|s| s.as_u16()),
                message: e.to_string(),
            })?;
        let status = resp.status();
        let text = resp.text().map_err(|e| TransportError::Transient {
            status: Some(status.as_u16()),
            message: e.to_string(),
        })?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(TransportError::Transient {
                status: Some(status.as_u16()),
                message: truncate(&text),
            });
        }
        if !status.is_success() {
            return Err(TransportError::Fatal {
                status: Some(status.as_u16()),
                message: truncate(&text),
            });
        }
        serde_json::from_str(&text).map_err(|e| TransportError::Fatal {
            status: Some(status.as_u16()),
            message: format!("undecodable body: {e}"),
        })
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(500).collect()
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct TranslateResponse {
    #[serde(rename = "translatedText")]
    translated_text: String,
}

#[derive(Deserialize)]
struct EmbedResponse {
    data: Vec<EmbedDatum>,
}

#[derive(Deserialize)]
struct EmbedDatum {
    index: usize,
    embedding: Vec<f64>,
}

impl Transport for HttpTransport {
    fn chat(&self, req: &ChatRequest) -> Result<String, TransportError> {
        let mut body = json!({
            "model": req.model_id,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        });
        if let Some(seed) = req.seed {
            body["seed"] = json!(seed);
        }
        let resp: ChatResponse = self.post(&self.chat_url, &body)?;
        resp.choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| TransportError::Fatal {
                status: None,
                message: "response has no message content".into(),
            })
    }

    fn translate(&self, req: &TranslateRequest) -> Result<String, TransportError> {
        let body = json!({"q": req.text, "source": req.source, "target": req.target, "format": "text"});
        let resp: TranslateResponse = self.post(&self.translate_url, &body)?;
        Ok(resp.translated_text)
    }

    fn embed(&self, req: &EmbedRequest) -> Result<Vec<Vec<f64>>, TransportError> {
        let body = json!({"model": req.model_id, "input": req.texts});
        let mut resp: EmbedResponse = self.post(&self.embed_url, &body)?;
        resp.data.sort_by_key(|d| d.index);
        Ok(resp.data.into_iter().map(|d| d.embedding).collect())
    }
}
