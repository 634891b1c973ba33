//! On-disk corpus layout.
//!
//! ```text
//! corpus/
//!   manifest.toml        entities, issues, events, document file list
//!   documents/*.jsonl    one Document JSON object per line
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Corpus, Document, EntityRecord, EventRecord, EventSource, IssueRecord};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.toml";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    /// Document files relative to the manifest directory.
    #[serde(default)]
    pub document_files: Vec<String>,
    /// Regenerate events from daily news counts instead of using `events`.
    #[serde(default)]
    pub detect_events: bool,
    #[serde(default = "default_skip_days")]
    pub skip_days: u32,
    #[serde(default)]
    pub entities: Vec<EntityRecord>,
    #[serde(default)]
    pub issues: Vec<IssueRecord>,
    #[serde(default)]
    pub events: Vec<EventRecord>,
}

fn default_skip_days() -> u32 {
    7
}

pub(super) fn load(path: &Path) -> Result<Corpus> {
    let manifest_path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let root = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest = toml::from_str(&text)
        .map_err(|e| Error::schema(manifest_path.display().to_string(), e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::schema(
            manifest_path.display().to_string(),
            format!("unsupported format_version {}", manifest.format_version),
        ));
    }

    let mut documents = Vec::new();
    for rel in &manifest.document_files {
        let file = root.join(rel);
        let f = fs::File::open(&file).map_err(|e| Error::io(&file, e))?;
        for (lineno, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&file, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(&line).map_err(|e| {
                Error::schema(format!("{}:{}", file.display(), lineno + 1), e.to_string())
            })?;
            documents.push(doc);
        }
    }

    let source = if manifest.detect_events {
        EventSource::Detect {
            skip_days: manifest.skip_days,
        }
    } else {
        EventSource::Supplied
    };
    Corpus::from_parts(
        manifest.entities,
        manifest.issues,
        manifest.events,
        documents,
        source,
    )
}

/// Writes a corpus in the on-disk layout, one document file per type.
pub fn write_corpus(corpus: &Corpus, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let docs_dir = dir.join("documents");
    fs::create_dir_all(&docs_dir).map_err(|e| Error::io(&docs_dir, e))?;

    let mut files = Vec::new();
    for t in super::DocType::ALL {
        let docs: Vec<&Document> = corpus.documents().iter().filter(|d| d.doc_type == t).collect();
        if docs.is_empty() {
            continue;
        }
        let rel = format!("documents/{t}.jsonl");
        let path = dir.join(&rel);
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        for d in docs {
            let line = serde_json::to_string(d)
                .map_err(|e| Error::schema(format!("document {}", d.id), e.to_string()))?;
            writeln!(f, "{line}").map_err(|e| Error::io(&path, e))?;
        }
        files.push(rel);
    }

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        document_files: files,
        detect_events: false,
        skip_days: default_skip_days(),
        entities: corpus.entities().cloned().collect(),
        issues: corpus.issues().cloned().collect(),
        events: corpus.all_events().cloned().collect(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::schema("manifest", e.to_string()))?;
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
