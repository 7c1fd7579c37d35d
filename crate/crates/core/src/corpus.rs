//! Labeled text datasets: the data model, JSONL/TSV ingestion and the
//! per-class low-resource subsampling protocol.
//!
//! JSONL records look like `{"id": "...", "text": "...", "label": "..."}`;
//! `id` is optional and two further optional keys are understood: `split`
//! (`train`, `dev` or `test`, default `train`) and `provenance`.
//!
//! TSV rows are `text<TAB>label`, optionally followed by `id`, `split` and a
//! JSON-encoded `provenance` column. A header row naming the columns is
//! optional. Inside a field, tab, newline, carriage return and backslash are
//! written as `\t`, `\n`, `\r` and `\\`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SeededRng;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: no records")]
    NoRecords { path: PathBuf },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate id `{id}` in {split} split")]
    DuplicateId { id: String, split: Split },
    #[error("id `{id}` appears in both {first} and {second} splits")]
    SharedId {
        id: String,
        first: Split,
        second: Split,
    },
    #[error("example `{id}` has empty text")]
    EmptyText { id: String },
    #[error("label `{label}` of example `{id}` is not in the label inventory")]
    UnknownLabel { id: String, label: String },
    #[error("label `{label}` has no examples in the {split} split")]
    MissingLabel { label: String, split: Split },
    #[error("per_class must be at least 1")]
    ZeroPerClass,
    #[error("unknown dataset format `{0}` (expected jsonl or tsv)")]
    UnknownFormat(String),
    #[error("no train/dev/test files found in {0}")]
    EmptyDirectory(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CorpusError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "valid" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Details of a machine-generated example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generation {
    /// Augmentation method name, e.g. `eda` or `llm-zero-shot`.
    pub method: String,
    pub seed: u64,
    /// Prompt id, EDA operation name or pivot language, depending on the method.
    pub prompt_id: String,
    /// Id of the example this one was derived from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_id: Option<String>,
    /// Annotations such as `duplicate-of-source` or `shortfall`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Original,
    Generated(Generation),
}

impl Provenance {
    pub fn is_original(&self) -> bool {
        matches!(self, Provenance::Original)
    }

    pub fn generation(&self) -> Option<&Generation> {
        match self {
            Provenance::Original => None,
            Provenance::Generated(g) => Some(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Provenance::is_original")]
    pub provenance: Provenance,
}

impl LabeledExample {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Result<Self> {
        let example = LabeledExample {
            id: id.into(),
            text: text.into(),
            label: label.into(),
            provenance: Provenance::Original,
        };
        if example.text.trim().is_empty() {
            return Err(CorpusError::EmptyText { id: example.id });
        }
        Ok(example)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetBundle {
    pub task_name: String,
    /// Sorted, de-duplicated class labels.
    pub labels: Vec<String>,
    pub train: Vec<LabeledExample>,
    pub dev: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
}

impl DatasetBundle {
    /// Builds a bundle whose label inventory is the set of observed labels.
    pub fn new(
        task_name: impl Into<String>,
        train: Vec<LabeledExample>,
        dev: Vec<LabeledExample>,
        test: Vec<LabeledExample>,
    ) -> Result<Self> {
        let labels: BTreeSet<String> = train
            .iter()
            .chain(&dev)
            .chain(&test)
            .map(|e| e.label.clone())
            .collect();
        Self::with_labels(task_name, labels, train, dev, test)
    }

    /// Builds a bundle with an explicit label inventory (a superset of the observed labels).
    pub fn with_labels(
        task_name: impl Into<String>,
        labels: impl IntoIterator<Item = String>,
        train: Vec<LabeledExample>,
        dev: Vec<LabeledExample>,
        test: Vec<LabeledExample>,
    ) -> Result<Self> {
        let labels: BTreeSet<String> = labels.into_iter().collect();
        let bundle = DatasetBundle {
            task_name: task_name.into(),
            labels: labels.into_iter().collect(),
            train,
            dev,
            test,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn split(&self, split: Split) -> &[LabeledExample] {
        match split {
            Split::Train => &self.train,
            Split::Dev => &self.dev,
            Split::Test => &self.test,
        }
    }

    fn split_mut(&mut self, split: Split) -> &mut Vec<LabeledExample> {
        match split {
            Split::Train => &mut self.train,
            Split::Dev => &mut self.dev,
            Split::Test => &mut self.test,
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.dev.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label_counts(&self, split: Split) -> BTreeMap<&str, usize> {
        let mut counts: BTreeMap<&str, usize> = self.labels.iter().map(|l| (l.as_str(), 0)).collect();
        for e in self.split(split) {
            *counts.entry(e.label.as_str()).or_default() += 1;
        }
        counts
    }

    /// Checks the bundle invariants: non-empty texts, known labels,
    /// ids unique within a split and disjoint across splits.
    pub fn validate(&self) -> Result<()> {
        let inventory: HashSet<&str> = self.labels.iter().map(String::as_str).collect();
        let mut owner: BTreeMap<&str, Split> = BTreeMap::new();
        for split in Split::ALL {
            let mut seen = HashSet::new();
            for e in self.split(split) {
                if e.text.trim().is_empty() {
                    return Err(CorpusError::EmptyText { id: e.id.clone() });
                }
                if !inventory.contains(e.label.as_str()) {
                    return Err(CorpusError::UnknownLabel {
                        id: e.id.clone(),
                        label: e.label.clone(),
                    });
                }
                if !seen.insert(e.id.as_str()) {
                    return Err(CorpusError::DuplicateId {
                        id: e.id.clone(),
                        split,
                    });
                }
                if let Some(first) = owner.insert(e.id.as_str(), split) {
                    return Err(CorpusError::SharedId {
                        id: e.id.clone(),
                        first,
                        second: split,
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Tsv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Jsonl => "jsonl",
            Format::Tsv => "tsv",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Some(Format::Jsonl),
            "tsv" | "txt" => Some(Format::Tsv),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Debug, Deserialize)]
struct JsonRecord {
    #[serde(default)]
    id: Option<String>,
    text: String,
    label: String,
    #[serde(default)]
    split: Option<Split>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    id: &'a str,
    text: &'a str,
    label: &'a str,
    split: Split,
    #[serde(skip_serializing_if = "Provenance::is_original")]
    provenance: &'a Provenance,
}

struct RawRecord {
    line: usize,
    id: Option<String>,
    text: String,
    label: String,
    split: Split,
    provenance: Provenance,
}

/// Loads one dataset file. Records without a `split` go to `train`.
pub fn load_dataset(path: &Path, format: Format) -> Result<DatasetBundle> {
    load_with_default_split(path, format, Split::Train)
}

fn task_name_of(path: &Path) -> String {
    path.file_stem()
        .or_else(|| path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "task".to_string())
}

fn load_with_default_split(path: &Path, format: Format, default_split: Split) -> Result<DatasetBundle> {
    let content = fs::read_to_string(path).map_err(io_err(path))?;
    let records = match format {
        Format::Jsonl => parse_jsonl(path, &content, default_split)?,
        Format::Tsv => parse_tsv(path, &content, default_split)?,
    };
    if records.is_empty() {
        return Err(CorpusError::NoRecords {
            path: path.to_path_buf(),
        });
    }
    assemble(task_name_of(path), path, records)
}

/// Loads a directory holding `train`, `dev` and/or `test` files
/// (`.jsonl` preferred over `.tsv`). The task name is the directory name.
pub fn load_dataset_dir(dir: &Path) -> Result<DatasetBundle> {
    let mut records = Vec::new();
    let mut found = false;
    for split in Split::ALL {
        for format in [Format::Jsonl, Format::Tsv] {
            let path = dir.join(format!("{}.{}", split.as_str(), format.extension()));
            if path.is_file() {
                let content = fs::read_to_string(&path).map_err(io_err(&path))?;
                let parsed = match format {
                    Format::Jsonl => parse_jsonl(&path, &content, split)?,
                    Format::Tsv => parse_tsv(&path, &content, split)?,
                };
                if parsed.is_empty() {
                    return Err(CorpusError::NoRecords { path });
                }
                records.extend(parsed);
                found = true;
                break;
            }
        }
    }
    if !found {
        return Err(CorpusError::EmptyDirectory(dir.to_path_buf()));
    }
    let name = dir
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| task_name_of(dir));
    assemble(name, dir, records)
}

/// Loads either a directory of split files or a single dataset file.
pub fn load_path(path: &Path, format: Option<Format>) -> Result<DatasetBundle> {
    if path.is_dir() {
        return load_dataset_dir(path);
    }
    let format = match format.or_else(|| Format::from_path(path)) {
        Some(f) => f,
        None => {
            return Err(CorpusError::UnknownFormat(
                path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_default(),
            ))
        }
    };
    load_dataset(path, format)
}

/// Loads a flat list of examples from one file, ignoring any split markers.
pub fn load_examples(path: &Path, format: Format) -> Result<Vec<LabeledExample>> {
    let bundle = load_dataset(path, format)?;
    let DatasetBundle { train, dev, test, .. } = bundle;
    Ok(train.into_iter().chain(dev).chain(test).collect())
}

fn assemble(task_name: String, path: &Path, records: Vec<RawRecord>) -> Result<DatasetBundle> {
    let mut bundle = DatasetBundle {
        task_name,
        labels: Vec::new(),
        train: Vec::new(),
        dev: Vec::new(),
        test: Vec::new(),
    };
    let mut explicit: BTreeMap<(Split, String), usize> = BTreeMap::new();
    let mut labels = BTreeSet::new();
    for rec in records {
        if rec.text.trim().is_empty() {
            return Err(CorpusError::Malformed {
                path: path.to_path_buf(),
                line: rec.line,
                message: "empty text".into(),
            });
        }
        let list = bundle.split_mut(rec.split);
        let id = match rec.id {
            Some(id) => {
                if let Some(first) = explicit.insert((rec.split, id.clone()), rec.line) {
                    return Err(CorpusError::Malformed {
                        path: path.to_path_buf(),
                        line: rec.line,
                        message: format!("duplicate id `{id}` (first seen on line {first})"),
                    });
                }
                id
            }
            None => format!("{}-{}", rec.split.as_str(), list.len()),
        };
        labels.insert(rec.label.clone());
        list.push(LabeledExample {
            id,
            text: rec.text,
            label: rec.label,
            provenance: rec.provenance,
        });
    }
    bundle.labels = labels.into_iter().collect();
    bundle.validate()?;
    Ok(bundle)
}

fn parse_jsonl(path: &Path, content: &str, default_split: Split) -> Result<Vec<RawRecord>> {
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(line).map_err(|e| CorpusError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(RawRecord {
            line: i + 1,
            id: rec.id,
            text: rec.text,
            label: rec.label,
            split: rec.split.unwrap_or(default_split),
            provenance: rec.provenance.unwrap_or_default(),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Column {
    Text,
    Label,
    Id,
    Split,
    Provenance,
    Ignored,
}

const DEFAULT_COLUMNS: [Column; 5] = [
    Column::Text,
    Column::Label,
    Column::Id,
    Column::Split,
    Column::Provenance,
];

fn parse_tsv(path: &Path, content: &str, default_split: Split) -> Result<Vec<RawRecord>> {
    let mut out = Vec::new();
    let mut columns: Option<Vec<Column>> = None;
    let malformed = |line: usize, message: String| CorpusError::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    for (i, line) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if columns.is_none() && out.is_empty() && is_header(&fields) {
            columns = Some(
                fields
                    .iter()
                    .map(|f| match f.trim().to_ascii_lowercase().as_str() {
                        "text" => Column::Text,
                        "label" => Column::Label,
                        "id" => Column::Id,
                        "split" => Column::Split,
                        "provenance" => Column::Provenance,
                        _ => Column::Ignored,
                    })
                    .collect(),
            );
            continue;
        }
        if fields.len() < 2 {
            return Err(malformed(
                line_no,
                format!("expected at least 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        let layout: &[Column] = columns.as_deref().unwrap_or(&DEFAULT_COLUMNS);
        let mut rec = RawRecord {
            line: line_no,
            id: None,
            text: String::new(),
            label: String::new(),
            split: default_split,
            provenance: Provenance::Original,
        };
        let mut has_text = false;
        let mut has_label = false;
        for (field, column) in fields.iter().zip(layout.iter().copied()) {
            let value = unescape_tsv(field);
            match column {
                Column::Text => {
                    rec.text = value;
                    has_text = true;
                }
                Column::Label => {
                    rec.label = value;
                    has_label = true;
                }
                Column::Id if !value.is_empty() => rec.id = Some(value),
                Column::Split if !value.is_empty() => {
                    rec.split = value.parse().map_err(|e: String| malformed(line_no, e))?;
                }
                Column::Provenance if !value.is_empty() => {
                    rec.provenance = serde_json::from_str(&value)
                        .map_err(|e| malformed(line_no, format!("bad provenance: {e}")))?;
                }
                _ => {}
            }
        }
        if !has_text || !has_label {
            return Err(malformed(line_no, "missing text or label column".into()));
        }
        if rec.label.trim().is_empty() {
            return Err(malformed(line_no, "empty label".into()));
        }
        out.push(rec);
    }
    Ok(out)
}

fn is_header(fields: &[&str]) -> bool {
    fields.len() >= 2
        && fields[0].trim().eq_ignore_ascii_case("text")
        && fields[1].trim().eq_ignore_ascii_case("label")
}

pub fn escape_tsv(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape_tsv(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// Writes every split of `bundle` to one file, tagging each record with its split.
pub fn save_dataset(bundle: &DatasetBundle, path: &Path, format: Format) -> Result<()> {
    let records: Vec<(Split, &LabeledExample)> = Split::ALL
        .iter()
        .flat_map(|&s| bundle.split(s).iter().map(move |e| (s, e)))
        .collect();
    write_records(path, format, &records)
}

/// Writes a flat list of examples, all tagged with `split`.
pub fn save_examples(examples: &[LabeledExample], split: Split, path: &Path, format: Format) -> Result<()> {
    let records: Vec<(Split, &LabeledExample)> = examples.iter().map(|e| (split, e)).collect();
    write_records(path, format, &records)
}

/// Writes `train.<ext>`, `dev.<ext>` and `test.<ext>` into `dir`, skipping empty splits.
pub fn save_dataset_dir(bundle: &DatasetBundle, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for split in Split::ALL {
        let examples = bundle.split(split);
        if examples.is_empty() {
            continue;
        }
        let path = dir.join(format!("{}.{}", split.as_str(), format.extension()));
        save_examples(examples, split, &path, format)?;
        written.push(path);
    }
    Ok(written)
}

fn write_records(path: &Path, format: Format, records: &[(Split, &LabeledExample)]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        match format {
            Format::Jsonl => {
                for (split, e) in records {
                    let rec = JsonRecordOut {
                        id: &e.id,
                        text: &e.text,
                        label: &e.label,
                        split: *split,
                        provenance: &e.provenance,
                    };
                    serde_json::to_writer(&mut *w, &rec)?;
                    w.write_all(b"\n")?;
                }
            }
            Format::Tsv => {
                w.write_all(b"text\tlabel\tid\tsplit\tprovenance\n")?;
                for (split, e) in records {
                    let provenance = if e.provenance.is_original() {
                        String::new()
                    } else {
                        serde_json::to_string(&e.provenance)?
                    };
                    writeln!(
                        w,
                        "{}\t{}\t{}\t{}\t{}",
                        escape_tsv(&e.text),
                        escape_tsv(&e.label),
                        escape_tsv(&e.id),
                        split.as_str(),
                        escape_tsv(&provenance)
                    )?;
                }
            }
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub per_class: usize,
    pub seed: u64,
}

impl SubsampleSpec {
    pub fn new(per_class: usize, seed: u64) -> Result<Self> {
        if per_class == 0 {
            return Err(CorpusError::ZeroPerClass);
        }
        Ok(SubsampleSpec { per_class, seed })
    }
}

/// Draws `min(per_class, available)` examples per label from train, then
/// from dev, out of one generator seeded with `spec.seed`. Selected examples
/// keep their original relative order. The test split is passed through.
pub fn subsample(bundle: &DatasetBundle, spec: &SubsampleSpec) -> Result<DatasetBundle> {
    if spec.per_class == 0 {
        return Err(CorpusError::ZeroPerClass);
    }
    let mut rng = SeededRng::new(spec.seed);
    let train = draw_per_class(bundle, Split::Train, spec.per_class, &mut rng)?;
    let dev = draw_per_class(bundle, Split::Dev, spec.per_class, &mut rng)?;
    Ok(DatasetBundle {
        task_name: bundle.task_name.clone(),
        labels: bundle.labels.clone(),
        train,
        dev,
        test: bundle.test.clone(),
    })
}

fn draw_per_class(
    bundle: &DatasetBundle,
    split: Split,
    per_class: usize,
    rng: &mut SeededRng,
) -> Result<Vec<LabeledExample>> {
    let examples = bundle.split(split);
    let mut chosen = Vec::new();
    for label in &bundle.labels {
        let members: Vec<usize> = examples
            .iter()
            .enumerate()
            .filter(|(_, e)| &e.label == label)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            return Err(CorpusError::MissingLabel {
                label: label.clone(),
                split,
            });
        }
        chosen.extend(rng.sample_indices(members.len(), per_class).into_iter().map(|j| members[j]));
    }
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| examples[i].clone()).collect())
}
