//! Dialogflow ES agent-export adapter.
//!
//! Loads an unpacked agent-export directory into a [`ChatbotModel`] and
//! serializes models (pristine or mutated) back to disk. The adapter is
//! lossless: every file is carried in the model's [`SourceMap`], modeled
//! files as parsed document trees plus their original bytes, everything else
//! verbatim. Untouched files round-trip byte-identically; rewritten files are
//! normalized (original key order, two-space indentation).
//!
//! An export directory looks like:
//!
//! ```text
//! agent.json
//! package.json
//! intents/<name>.json
//! intents/<name>_usersays_<lang>.json
//! entities/<name>.json
//! entities/<name>_entries_<lang>.json
//! ```
//!
//! Definition files and their per-language companion files are linked by
//! filename stem, not by the display name inside the document.

mod parse;

pub use parse::build_model;

use crate::model::{ChatbotModel, Locator};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// How a file participates in the agent format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileRole {
    AgentManifest,
    IntentDef { stem: String },
    IntentUsersays { stem: String, lang: String },
    EntityDef { stem: String },
    EntityEntries { stem: String, lang: String },
    /// Preserved verbatim, never modeled or mutated.
    Opaque,
}

/// One file of the agent export.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub role: FileRole,
    /// Bytes as read from disk.
    pub original: Vec<u8>,
    /// Parsed document tree for modeled JSON files; `None` for opaque files.
    pub doc: Option<Value>,
}

/// Non-fatal findings from loading.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadWarning {
    /// A usersays/entries file without a matching definition file; preserved
    /// verbatim but not modeled.
    OrphanCompanion { path: String },
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadWarning::OrphanCompanion { path } => {
                write!(f, "companion file {path} has no definition file")
            }
        }
    }
}

/// Per-file backing store of a model: document trees, verbatim payloads and
/// load warnings. Owned by this adapter; opaque to the meta-model.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    /// Keyed by agent-relative path with forward slashes.
    pub files: BTreeMap<String, SourceFile>,
    pub warnings: Vec<LoadWarning>,
    /// Agent name to fall back on when agent.json has no displayName;
    /// usually the export directory name.
    pub fallback_name: String,
}

impl SourceMap {
    pub fn document(&self, file: &str) -> Option<&Value> {
        self.files.get(file)?.doc.as_ref()
    }

    pub fn original_bytes(&self, file: &str) -> Option<&[u8]> {
        self.files.get(file).map(|f| f.original.as_slice())
    }

    /// Companion files (usersays or entries) of a definition file, by stem.
    pub fn companions_of(&self, def_path: &str) -> Vec<String> {
        let Some(def) = self.files.get(def_path) else {
            return Vec::new();
        };
        let want = |role: &FileRole| match (&def.role, role) {
            (FileRole::IntentDef { stem }, FileRole::IntentUsersays { stem: s, .. }) => s == stem,
            (FileRole::EntityDef { stem }, FileRole::EntityEntries { stem: s, .. }) => s == stem,
            _ => false,
        };
        self.files
            .iter()
            .filter(|(_, f)| want(&f.role))
            .map(|(p, _)| p.clone())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("no agent.json found under {root}")]
    MissingAgentManifest { root: PathBuf },
    #[error("malformed document {path}: {source}")]
    MalformedDocument {
        path: String,
        source: serde_json::Error,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
pub enum SaveError {
    #[error("destination {0} is not empty (pass overwrite to replace)")]
    DestinationNotEmpty(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
#[error("path not found: {0}")]
pub struct PathNotFound(pub Locator);

/// Output shape of a save: everything, or just the modified files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    Full,
    ModifiedOnly,
}

/// One file written to disk, with its content digest.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WrittenFile {
    pub path: String,
    pub sha256: String,
}

/// What a save produced: files written and files that exist in the source
/// layout but not in this model (removals).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WriteManifest {
    pub written: Vec<WrittenFile>,
    pub deleted: Vec<String>,
}

/// A resolved element: where it lives and what it currently holds.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementHandle {
    pub locator: Locator,
    pub value: Value,
}

fn classify(rel: &str) -> FileRole {
    if rel == "agent.json" {
        return FileRole::AgentManifest;
    }
    let companion = |prefix: &str, marker: &str| -> Option<(String, String)> {
        let name = rel.strip_prefix(prefix)?.strip_suffix(".json")?;
        if name.contains('/') {
            return None;
        }
        match name.rfind(marker) {
            Some(at) => Some((name[..at].to_string(), name[at + marker.len()..].to_string())),
            None => Some((name.to_string(), String::new())),
        }
    };
    if let Some((stem, lang)) = companion("intents/", "_usersays_") {
        return if lang.is_empty() {
            FileRole::IntentDef { stem }
        } else {
            FileRole::IntentUsersays { stem, lang }
        };
    }
    if let Some((stem, lang)) = companion("entities/", "_entries_") {
        return if lang.is_empty() {
            FileRole::EntityDef { stem }
        } else {
            FileRole::EntityEntries { stem, lang }
        };
    }
    FileRole::Opaque
}

fn read_dir_recursive(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) -> Result<(), LoadError> {
    let entries = fs::read_dir(dir).map_err(|source| LoadError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for entry in entries {
        let entry = entry.map_err(|source| LoadError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if path.is_dir() {
            read_dir_recursive(root, &path, out)?;
        } else {
            let rel = path
                .strip_prefix(root)
                .expect("entry under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            let bytes = fs::read(&path).map_err(|source| LoadError::Io {
                path: path.clone(),
                source,
            })?;
            out.insert(rel, bytes);
        }
    }
    Ok(())
}

/// Classifies and parses raw file contents into a [`SourceMap`].
pub fn source_map_from_bytes(
    raw: BTreeMap<String, Vec<u8>>,
    fallback_name: &str,
) -> Result<SourceMap, LoadError> {
    let mut files = BTreeMap::new();
    let mut warnings = Vec::new();

    let def_stems: BTreeSet<(bool, String)> = raw
        .keys()
        .filter_map(|rel| match classify(rel) {
            FileRole::IntentDef { stem } => Some((true, stem)),
            FileRole::EntityDef { stem } => Some((false, stem)),
            _ => None,
        })
        .collect();

    for (rel, bytes) in raw {
        let mut role = classify(&rel);
        match &role {
            FileRole::IntentUsersays { stem, .. } if !def_stems.contains(&(true, stem.clone())) => {
                warnings.push(LoadWarning::OrphanCompanion { path: rel.clone() });
                role = FileRole::Opaque;
            }
            FileRole::EntityEntries { stem, .. } if !def_stems.contains(&(false, stem.clone())) => {
                warnings.push(LoadWarning::OrphanCompanion { path: rel.clone() });
                role = FileRole::Opaque;
            }
            _ => {}
        }
        let doc = if role == FileRole::Opaque {
            None
        } else {
            Some(
                serde_json::from_slice(&bytes).map_err(|source| LoadError::MalformedDocument {
                    path: rel.clone(),
                    source,
                })?,
            )
        };
        files.insert(
            rel,
            SourceFile {
                role,
                original: bytes,
                doc,
            },
        );
    }

    Ok(SourceMap {
        files,
        warnings,
        fallback_name: fallback_name.to_string(),
    })
}

/// Loads an unpacked Dialogflow export directory into a model.
pub fn load_agent(root: impl AsRef<Path>) -> Result<ChatbotModel, LoadError> {
    let root = root.as_ref();
    if !root.join("agent.json").is_file() {
        return Err(LoadError::MissingAgentManifest {
            root: root.to_path_buf(),
        });
    }
    let mut raw = BTreeMap::new();
    read_dir_recursive(root, root, &mut raw)?;
    let fallback = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "agent".to_string());
    let source_map = source_map_from_bytes(raw, &fallback)?;
    build_model(source_map)
}

/// Normalized serialization for rewritten files: preserved key order,
/// two-space indentation, trailing newline.
pub fn serialize_document(doc: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(doc).expect("document serializes");
    bytes.push(b'\n');
    bytes
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write;
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Writes `model` under `dest`.
///
/// `Full` emits every file of the model, rewriting the dirty ones from their
/// document trees and copying everything else byte-for-byte. `ModifiedOnly`
/// emits exactly the dirty files, mirroring the original relative layout.
/// Dirty paths no longer present in the model are reported as deletions.
pub fn save_agent(
    model: &ChatbotModel,
    dest: impl AsRef<Path>,
    mode: OutputMode,
    dirty: &BTreeSet<String>,
    overwrite: bool,
) -> Result<WriteManifest, SaveError> {
    let dest = dest.as_ref();
    if dest.exists() {
        let occupied = fs::read_dir(dest)
            .map(|mut d| d.next().is_some())
            .unwrap_or(false);
        if occupied && !overwrite {
            return Err(SaveError::DestinationNotEmpty(dest.to_path_buf()));
        }
    }
    fs::create_dir_all(dest).map_err(|source| SaveError::Io {
        path: dest.to_path_buf(),
        source,
    })?;

    let mut manifest = WriteManifest::default();
    for path in dirty {
        if !model.source_map.files.contains_key(path) {
            manifest.deleted.push(path.clone());
        }
    }

    for (rel, file) in &model.source_map.files {
        let is_dirty = dirty.contains(rel);
        if mode == OutputMode::ModifiedOnly && !is_dirty {
            continue;
        }
        let bytes = match (&file.doc, is_dirty) {
            (Some(doc), true) => serialize_document(doc),
            _ => file.original.clone(),
        };
        let target = dest.join(rel);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent).map_err(|source| SaveError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&target, &bytes).map_err(|source| SaveError::Io {
            path: target.clone(),
            source,
        })?;
        manifest.written.push(WrittenFile {
            path: rel.clone(),
            sha256: sha256_hex(&bytes),
        });
    }
    Ok(manifest)
}

/// Platform-specific finder: looks a locator up in the model's documents and
/// returns the element it currently addresses.
pub fn resolve(model: &ChatbotModel, locator: &Locator) -> Result<ElementHandle, PathNotFound> {
    let doc = model
        .source_map
        .document(&locator.file)
        .ok_or_else(|| PathNotFound(locator.clone()))?;
    let value = locator
        .path
        .resolve(doc)
        .ok_or_else(|| PathNotFound(locator.clone()))?;
    Ok(ElementHandle {
        locator: locator.clone(),
        value: value.clone(),
    })
}
