use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{fingerprint, ProviderError, ProviderKind, Result};

/// One line of a cassette file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderCallRecord {
    pub request_fingerprint: String,
    pub provider_kind: ProviderKind,
    pub request: serde_json::Value,
    pub response: String,
    pub timestamp: String,
}

impl ProviderCallRecord {
    pub fn new(kind: ProviderKind, request: serde_json::Value, response: String) -> Self {
        ProviderCallRecord {
            request_fingerprint: fingerprint(kind, &request),
            provider_kind: kind,
            request,
            response,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn fingerprint_is_consistent(&self) -> bool {
        fingerprint(self.provider_kind, &self.request) == self.request_fingerprint
    }
}

/// Append-only JSONL log of provider calls.
///
/// The lookup index is built once at load time and never mutated, so replay
/// lookups take no lock. Appends go through a single mutex-guarded writer.
/// When a fingerprint occurs more than once the first record wins.
#[derive(Debug)]
pub struct Cassette {
    path: Option<PathBuf>,
    index: HashMap<String, String>,
    loaded: usize,
    writer: Option<Mutex<BufWriter<File>>>,
    recorded: Mutex<Vec<ProviderCallRecord>>,
}

impl Cassette {
    pub fn in_memory() -> Self {
        Cassette {
            path: None,
            index: HashMap::new(),
            loaded: 0,
            writer: None,
            recorded: Mutex::new(Vec::new()),
        }
    }

    pub fn from_records(records: impl IntoIterator<Item = ProviderCallRecord>) -> Self {
        let mut cassette = Cassette::in_memory();
        for r in records {
            cassette.loaded += 1;
            cassette.index.entry(r.request_fingerprint).or_insert(r.response);
        }
        cassette
    }

    /// Reads a cassette file, checking every fingerprint against its request.
    pub fn load(path: &Path) -> Result<Self> {
        let records = read_records(path)?;
        let mut cassette = Cassette::from_records(records);
        cassette.path = Some(path.to_path_buf());
        Ok(cassette)
    }

    /// Loads `path` if it exists and opens it for appending.
    pub fn open_for_record(path: &Path) -> Result<Self> {
        let mut cassette = if path.exists() {
            Cassette::load(path)?
        } else {
            Cassette::in_memory()
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| cassette_err(path, e))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| cassette_err(path, e))?;
        cassette.path = Some(path.to_path_buf());
        cassette.writer = Some(Mutex::new(BufWriter::new(file)));
        Ok(cassette)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn lookup(&self, fingerprint: &str) -> Option<&str> {
        self.index.get(fingerprint).map(String::as_str)
    }

    /// Records present at load time plus those appended since.
    pub fn len(&self) -> usize {
        self.loaded + self.recorded.lock().expect("cassette lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn append(&self, record: ProviderCallRecord) -> Result<()> {
        let mut recorded = self.recorded.lock().expect("cassette lock");
        if let Some(writer) = &self.writer {
            let mut w = writer.lock().expect("cassette writer lock");
            let line = serde_json::to_string(&record).expect("record serializes");
            let path = self.path.as_deref().unwrap_or(Path::new("<cassette>"));
            w.write_all(line.as_bytes())
                .and_then(|_| w.write_all(b"\n"))
                .and_then(|_| w.flush())
                .map_err(|e| cassette_err(path, e))?;
        }
        recorded.push(record);
        Ok(())
    }

    /// Records appended through this handle.
    pub fn recorded(&self) -> Vec<ProviderCallRecord> {
        self.recorded.lock().expect("cassette lock").clone()
    }

    /// A read-only copy containing loaded and appended records.
    pub fn to_replay(&self) -> Cassette {
        let mut out = Cassette::from_records(self.recorded());
        for (k, v) in &self.index {
            out.index.insert(k.clone(), v.clone());
        }
        out.loaded += self.loaded;
        out.path = self.path.clone();
        out
    }
}

fn cassette_err(path: &Path, e: impl std::fmt::Display) -> ProviderError {
    ProviderError::Cassette {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub(crate) fn read_records(path: &Path) -> Result<Vec<ProviderCallRecord>> {
    let content = fs::read_to_string(path).map_err(|e| cassette_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ProviderCallRecord =
            serde_json::from_str(line).map_err(|e| cassette_err(path, format!("line {}: {e}", i + 1)))?;
        if !record.fingerprint_is_consistent() {
            return Err(cassette_err(
                path,
                format!("line {}: fingerprint does not match request", i + 1),
            ));
        }
        out.push(record);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn file_round_trip_and_first_record_wins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/cassette.jsonl");
        {
            let c = Cassette::open_for_record(&path).unwrap();
            c.append(ProviderCallRecord::new(ProviderKind::Chat, json!({"prompt": "a"}), "first".into()))
                .unwrap();
            c.append(ProviderCallRecord::new(ProviderKind::Chat, json!({"prompt": "a"}), "second".into()))
                .unwrap();
            c.append(ProviderCallRecord::new(ProviderKind::Translate, json!({"text": "b"}), "tr".into()))
                .unwrap();
        }
        // appending to an existing file keeps earlier records
        {
            let c = Cassette::open_for_record(&path).unwrap();
            assert_eq!(c.len(), 3);
            c.append(ProviderCallRecord::new(ProviderKind::Embed, json!({"texts": ["x"]}), "[[1.0]]".into()))
                .unwrap();
        }
        let c = Cassette::load(&path).unwrap();
        assert_eq!(c.len(), 4);
        let fp = fingerprint(ProviderKind::Chat, &json!({"prompt": "a"}));
        assert_eq!(c.lookup(&fp), Some("first"));
    }

    #[test]
    fn tampered_fingerprint_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut r = ProviderCallRecord::new(ProviderKind::Chat, json!({"prompt": "a"}), "x".into());
        r.request_fingerprint = "00".into();
        fs::write(&path, serde_json::to_string(&r).unwrap() + "\n").unwrap();
        let err = Cassette::load(&path).unwrap_err();
        assert!(err.to_string().contains("fingerprint"), "{err}");
    }
}
