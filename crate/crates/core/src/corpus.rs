//! Corpus ingestion from disk and conversion to datasets.
//!
//! Supported layouts:
//! - two-dirs: `spam/` and `ham/` subdirectories, one message per file
//! - mbox-pair: `spam.mbox` and `ham.mbox`
//! - manifest: a text file of `<label> <path>` lines (label `spam`, `ham`,
//!   or `unlabeled`), paths relative to the manifest
//! - directory: any other directory, every file an unlabelled message
//! - single: one file, a message or an mbox, unlabelled

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use walkdir::WalkDir;

use crate::dataset::Dataset;
use crate::email_parser::{parse_email, split_mbox, ParsedEmail, RawEmail};
use crate::error::{Error, Result};
use crate::features::{extract, FeatureVector, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    TwoDirs,
    MboxPair,
    Manifest,
    Directory,
    Single,
}

impl Layout {
    pub fn detect(path: &Path) -> Result<Layout> {
        let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
        if meta.is_dir() {
            if path.join("spam").is_dir() || path.join("ham").is_dir() {
                Ok(Layout::TwoDirs)
            } else if path.join("spam.mbox").is_file() || path.join("ham.mbox").is_file() {
                Ok(Layout::MboxPair)
            } else {
                Ok(Layout::Directory)
            }
        } else if path.extension().is_some_and(|e| e == "manifest") {
            Ok(Layout::Manifest)
        } else {
            Ok(Layout::Single)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub raw: RawEmail,
    pub label: Option<Label>,
    pub parsed: ParsedEmail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestFailure {
    pub source_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub failures: Vec<IngestFailure>,
    /// Where the corpus came from.
    pub manifest: String,
}

impl Corpus {
    /// Parse every candidate; parse failures are recorded rather than returned.
    pub fn from_candidates(candidates: Vec<(String, Vec<u8>, Option<Label>)>, manifest: String) -> Result<Corpus> {
        let mut ids = std::collections::HashSet::new();
        for (id, _, _) in &candidates {
            if !ids.insert(id.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate source id `{id}`")));
            }
        }
        let parsed: Vec<std::result::Result<CorpusEntry, IngestFailure>> = candidates
            .into_par_iter()
            .map(|(id, bytes, label)| {
                let fail = |e: Error| IngestFailure {
                    source_id: id.clone(),
                    reason: e.to_string(),
                };
                let raw = RawEmail::new(bytes, id.clone()).map_err(fail)?;
                let parsed = parse_email(&raw).map_err(fail)?;
                Ok(CorpusEntry { raw, label, parsed })
            })
            .collect();
        let mut corpus = Corpus {
            entries: Vec::new(),
            failures: Vec::new(),
            manifest,
        };
        for p in parsed {
            match p {
                Ok(e) => corpus.entries.push(e),
                Err(f) => corpus.failures.push(f),
            }
        }
        Ok(corpus)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn is_hidden(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with('.'))
}

/// Regular files under `dir`, sorted, with ids relative to `root`.
fn message_files(dir: &Path, root: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(path, e.into())
        })?;
        if entry.file_type().is_file() && !is_hidden(entry.path()) {
            let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
            let id = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            files.push((id, entry.path().to_path_buf()));
        }
    }
    Ok(files)
}

fn parse_manifest_label(s: &str) -> Result<Option<Label>> {
    match s {
        "unlabeled" | "-" => Ok(None),
        other => other.parse().map(Some),
    }
}

pub fn ingest(path: &Path, layout: Layout) -> Result<Corpus> {
    let mut candidates: Vec<(String, Vec<u8>, Option<Label>)> = Vec::new();
    match layout {
        Layout::TwoDirs => {
            for label in Label::ALL {
                let dir = path.join(label.as_str());
                if dir.is_dir() {
                    for (id, file) in message_files(&dir, path)? {
                        candidates.push((id, read(&file)?, Some(label)));
                    }
                }
            }
        }
        Layout::MboxPair => {
            for label in Label::ALL {
                let name = format!("{label}.mbox");
                let file = path.join(&name);
                if file.is_file() {
                    for (id, bytes) in split_mbox(&read(&file)?, &name) {
                        candidates.push((id, bytes, Some(label)));
                    }
                }
            }
        }
        Layout::Manifest => {
            let text = String::from_utf8_lossy(&read(path)?).into_owned();
            let base = path.parent().unwrap_or(Path::new("."));
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (label, file) = line.split_once(char::is_whitespace).ok_or_else(|| {
                    Error::InvalidDataset(format!("manifest line {}: expected `<label> <path>`", n + 1))
                })?;
                let label = parse_manifest_label(label)?;
                let file = file.trim();
                candidates.push((file.to_string(), read(&base.join(file))?, label));
            }
        }
        Layout::Directory => {
            for (id, file) in message_files(path, path)? {
                candidates.push((id, read(&file)?, None));
            }
        }
        Layout::Single => {
            let bytes = read(path)?;
            let name = path
                .file_name()
                .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
            if bytes.starts_with(b"From ") {
                for (id, msg) in split_mbox(&bytes, &name) {
                    candidates.push((id, msg, None));
                }
            } else {
                candidates.push((name, bytes, None));
            }
        }
    }

    // deterministic order regardless of layout
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    let corpus = Corpus::from_candidates(candidates, format!("{} ({:?})", path.display(), layout))?;
    if corpus.is_empty() {
        return Err(Error::NoMessagesFound(path.to_path_buf()));
    }
    Ok(corpus)
}

pub fn build_dataset(corpus: &Corpus) -> Dataset {
    let rows: Vec<FeatureVector> = corpus
        .entries
        .par_iter()
        .map(|e| FeatureVector {
            label: e.label,
            ..extract(&e.parsed)
        })
        .collect();
    Dataset::full(rows).expect("extract yields full vectors")
}

/// Write the corpus as a two-dirs layout; entries without a label go to `unlabeled/`.
pub fn write_two_dirs(corpus: &Corpus, out: &Path) -> Result<()> {
    for e in &corpus.entries {
        let file = out.join(e.raw.source_id());
        if let Some(parent) = file.parent() {
            fs::create_dir_all(parent).map_err(|err| Error::io(parent, err))?;
        }
        fs::write(&file, e.raw.bytes()).map_err(|err| Error::io(&file, err))?;
    }
    Ok(())
}
