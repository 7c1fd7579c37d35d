//! Minimal HTTP/1.1 server speaking the three wire protocols:
//! `POST /v1/chat/completions`, `POST /v1/translate`, `POST /v1/embeddings`.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde_json::{json, Value};

use crate::grammar::{classify_prompt, generated_sentence, paraphrase};
use crate::{hash_str, mix, Rng};

pub const EMBED_DIM: usize = 64;

#[derive(Debug, Clone, Default)]
pub struct MockOptions {
    /// The first `fail_first` requests get `fail_status`.
    pub fail_first: usize,
    pub fail_status: u16,
    /// When set, requests must carry `Authorization: Bearer <key>`.
    pub require_key: Option<String>,
    /// Items removed from the end of every chat list response.
    pub drop_items: usize,
}

#[derive(Default)]
struct Shared {
    options: MockOptions,
    failures_left: AtomicUsize,
    requests: AtomicUsize,
    stop: AtomicBool,
}

pub struct MockServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    pub fn start() -> std::io::Result<Self> {
        Self::start_with(MockOptions::default())
    }

    pub fn start_with(options: MockOptions) -> std::io::Result<Self> {
        Self::bind("127.0.0.1:0", options)
    }

    pub fn bind(addr: &str, options: MockOptions) -> std::io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            failures_left: AtomicUsize::new(options.fail_first),
            options,
            ..Shared::default()
        });
        let s = Arc::clone(&shared);
        let handle = std::thread::spawn(move || {
            for conn in listener.incoming() {
                if s.stop.load(Ordering::SeqCst) {
                    break;
                }
                if let Ok(stream) = conn {
                    let s = Arc::clone(&s);
                    std::thread::spawn(move || {
                        let _ = handle_connection(stream, &s);
                    });
                }
            }
        });
        Ok(MockServer {
            addr,
            shared,
            handle: Some(handle),
        })
    }

    /// Base URL including the `/v1` prefix.
    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    /// Blocks until the accept loop ends.
    pub fn wait(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }

    pub fn requests(&self) -> usize {
        self.shared.requests.load(Ordering::SeqCst)
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn handle_connection(stream: TcpStream, shared: &Shared) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line)? == 0 {
        return Ok(());
    }
    let mut content_length = 0usize;
    let mut auth = None;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            match k.trim().to_ascii_lowercase().as_str() {
                "content-length" => content_length = v.trim().parse().unwrap_or(0),
                "authorization" => auth = Some(v.trim().to_string()),
                _ => {}
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    shared.requests.fetch_add(1, Ordering::SeqCst);

    let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
    let (status, payload) = respond(shared, &path, auth.as_deref(), &body);
    let text = payload.to_string();
    let reason = match status {
        200 => "OK",
        401 => "Unauthorized",
        404 => "Not Found",
        400 => "Bad Request",
        429 => "Too Many Requests",
        _ => "Error",
    };
    let mut out = stream;
    write!(
        out,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
        text.len()
    )?;
    out.flush()
}

fn respond(shared: &Shared, path: &str, auth: Option<&str>, body: &[u8]) -> (u16, Value) {
    if let Some(key) = &shared.options.require_key {
        if auth != Some(&format!("Bearer {key}")) {
            return (401, json!({"error": "bad api key"}));
        }
    }
    let failing = shared
        .failures_left
        .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
        .is_ok();
    if failing {
        return (shared.options.fail_status, json!({"error": "injected failure"}));
    }
    let Ok(req) = serde_json::from_slice::<Value>(body) else {
        return (400, json!({"error": "body is not json"}));
    };
    if path.ends_with("/chat/completions") {
        let prompt = req["messages"][0]["content"].as_str().unwrap_or("");
        let seed = req["seed"].as_u64().unwrap_or_else(|| hash_str(prompt));
        let content = chat_reply(prompt, seed, shared.options.drop_items);
        (200, json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]}))
    } else if path.ends_with("/translate") {
        let q = req["q"].as_str().unwrap_or("");
        let source = req["source"].as_str().unwrap_or("en");
        let target = req["target"].as_str().unwrap_or("en");
        (200, json!({"translatedText": translate(q, source, target)}))
    } else if path.ends_with("/embeddings") {
        let inputs: Vec<&str> = req["input"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        let data: Vec<Value> = inputs
            .iter()
            .enumerate()
            .map(|(i, t)| json!({"index": i, "embedding": embed(t)}))
            .collect();
        (200, json!({"data": data}))
    } else {
        (404, json!({"error": format!("no route for {path}")}))
    }
}

fn first_number_after(text: &str, marker: &str) -> Option<usize> {
    let rest = &text[text.find(marker)? + marker.len()..];
    rest.split_whitespace().next()?.parse().ok()
}

/// Reply text for a chat prompt.
pub fn chat_reply(prompt: &str, seed: u64, drop_items: usize) -> String {
    let mut rng = Rng::new(mix(seed, hash_str(prompt)));
    if prompt.starts_with("Rephrase the following sentence") {
        let n = first_number_after(prompt, "sentence").unwrap_or(1);
        let sentence = prompt
            .split_once("label: ")
            .or_else(|| prompt.rsplit_once(": "))
            .map_or(prompt, |(_, s)| s);
        let offset = seed % 3;
        let items: Vec<String> = (0..n as u64).map(|i| paraphrase(sentence, i + offset, seed)).collect();
        return numbered(&items, drop_items);
    }
    let n = first_number_after(prompt, "Generate").unwrap_or(5);
    let items: Vec<String> = match classify_prompt(prompt) {
        Some((task, label)) => {
            let mut seen = std::collections::HashSet::new();
            let mut items = Vec::new();
            let mut tries = 0;
            while items.len() < n && tries < 50 * n {
                let s = generated_sentence(&mut rng, task, label);
                if seen.insert(s.clone()) {
                    items.push(s);
                }
                tries += 1;
            }
            items
        }
        None => {
            let topic: Vec<&str> = prompt.split_whitespace().take(6).collect();
            (0..n).map(|i| format!("Sentence {} about {}", i + 1, topic.join(" "))).collect()
        }
    };
    format!("Sure! Here are {n} sentences:\n\n{}", numbered(&items, drop_items))
}

fn numbered(items: &[String], drop_items: usize) -> String {
    let keep = items.len().saturating_sub(drop_items);
    items[..keep]
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{}. {s}", i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Pseudo-translation: tagging on the way out, a pivot-specific paraphrase
/// on the way back to English.
pub fn translate(q: &str, source: &str, target: &str) -> String {
    if target != "en" {
        return format!("[{target}] {q}");
    }
    let plain = q.strip_prefix(&format!("[{source}] ")).unwrap_or(q);
    let salt = hash_str(source);
    paraphrase(plain, 1 + salt % 5, salt)
}

/// Character-trigram hashing embedding, rounded to 6 decimals.
pub fn embed(text: &str) -> Vec<f64> {
    let mut v = vec![0.0f64; EMBED_DIM];
    for word in text.to_lowercase().split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        let padded: Vec<char> = format!("#{word}#").chars().collect();
        for tri in padded.windows(3) {
            let h = hash_str(&tri.iter().collect::<String>());
            v[(h % EMBED_DIM as u64) as usize] += if h & 1 == 0 { 1.0 } else { -1.0 };
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x = (*x / norm * 1e6).round() / 1e6);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shot_reply_has_n_distinct_items() {
        let r = chat_reply("Generate 20 sentences that are positive reviews to a movie", 3, 0);
        let lines: Vec<&str> = r.lines().filter(|l| l.starts_with(char::is_numeric)).collect();
        assert_eq!(lines.len(), 20);
        let set: std::collections::HashSet<_> = lines.iter().map(|l| l.split_once(". ").unwrap().1).collect();
        assert_eq!(set.len(), 20);
        assert_eq!(r, chat_reply("Generate 20 sentences that are positive reviews to a movie", 3, 0));
        assert_ne!(r, chat_reply("Generate 20 sentences that are positive reviews to a movie", 4, 0));
    }

    #[test]
    fn paraphrase_reply() {
        let r = chat_reply(
            "Rephrase the following sentence 3 different ways, keeping the same meaning and label: the movie is great",
            1,
            1,
        );
        assert_eq!(r.lines().count(), 2);
    }

    #[test]
    fn translation_round_trip_changes_wording_by_pivot() {
        let fwd = translate("find the movie called shadow point", "en", "de");
        assert!(fwd.starts_with("[de] "));
        let back = translate(&fwd, "de", "en");
        assert!(!back.starts_with('['));
        assert_ne!(back, translate(&translate("find the movie called shadow point", "en", "fr"), "fr", "en"));
    }
}
