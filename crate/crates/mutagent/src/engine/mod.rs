//! Campaign orchestration: enumerate, apply, write mutants, report.
//!
//! A campaign takes a source agent and a configuration, generates one mutant
//! per (operator, target) pair, writes each under its own directory, and
//! emits `report.json` describing every seeded change. Reports are
//! deterministic: identical sources, configuration and seed reproduce
//! byte-identical report files and mutant trees.

mod score;

pub use score::{
    reload_mutant, score_campaign, CategoryScore, MutantVerdict, ScoreError, ScoreOptions,
    ScoreRow, ScoreTable, DEFAULT_PROBE_DEPTH,
};

use crate::dialogflow::{
    load_agent, save_agent, serialize_document, sha256_hex, LoadError, OutputMode, SaveError,
    WrittenFile,
};
use crate::model::ChatbotModel;
use crate::operators::{
    apply, enumerate_targets, operator_catalog, MutationDescriptor, OperatorId,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use thiserror::Error;

/// Report file name, written at the campaign output root.
pub const REPORT_FILE: &str = "report.json";

/// Which operators a campaign runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSelection {
    /// The keyword `"all"`.
    Keyword(String),
    /// Explicit operator ids.
    Ids(Vec<String>),
}

impl Default for OperatorSelection {
    fn default() -> Self {
        OperatorSelection::Keyword("all".to_string())
    }
}

impl OperatorSelection {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn ids(ids: impl IntoIterator<Item = impl Into<String>>) -> Self {
        OperatorSelection::Ids(ids.into_iter().map(Into::into).collect())
    }

    /// Resolves to concrete operator ids, in catalog order.
    pub fn resolve(&self) -> Result<Vec<OperatorId>, CampaignError> {
        match self {
            OperatorSelection::Keyword(word) if word.eq_ignore_ascii_case("all") => {
                Ok(operator_catalog().iter().map(|s| s.id).collect())
            }
            OperatorSelection::Keyword(word) => Err(CampaignError::ConfigInvalid(format!(
                "unknown operator selection keyword {word:?} (expected \"all\")"
            ))),
            OperatorSelection::Ids(names) => {
                let mut selected = Vec::with_capacity(names.len());
                for name in names {
                    selected.push(OperatorId::parse(name).ok_or_else(|| {
                        CampaignError::ConfigInvalid(format!("unknown operator {name:?}"))
                    })?);
                }
                // Catalog order keeps reports stable regardless of listing order.
                Ok(operator_catalog()
                    .iter()
                    .map(|s| s.id)
                    .filter(|id| selected.contains(id))
                    .collect())
            }
        }
    }
}

/// Campaign configuration; also the schema of `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub source_root: PathBuf,
    pub output_root: PathBuf,
    #[serde(default = "default_output_mode")]
    pub output_mode: OutputMode,
    #[serde(default)]
    pub operators: OperatorSelection,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub overwrite: bool,
    /// Cap on mutants per operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mutants: Option<usize>,
}

fn default_output_mode() -> OutputMode {
    OutputMode::Full
}

impl MutationConfig {
    pub fn new(source_root: impl Into<PathBuf>, output_root: impl Into<PathBuf>) -> Self {
        Self {
            source_root: source_root.into(),
            output_root: output_root.into(),
            output_mode: OutputMode::Full,
            operators: OperatorSelection::all(),
            seed: 0,
            overwrite: false,
            max_mutants: None,
        }
    }
}

/// One generated mutant: its descriptor plus what landed on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    #[serde(flatten)]
    pub descriptor: MutationDescriptor,
    /// Directory of this mutant, relative to the output root.
    pub output_dir: String,
    pub files_written: Vec<WrittenFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files_deleted: Vec<String>,
    /// Set when generation of this mutant failed; the campaign continues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub generated_total: usize,
    pub failed_total: usize,
    pub per_operator: BTreeMap<String, usize>,
    pub per_category: BTreeMap<String, usize>,
}

/// The seeded-mutation report; serialized as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationReport {
    pub tool_version: String,
    pub seed: u64,
    pub source_root: String,
    /// Digest over every source file (path and content).
    pub source_digest: String,
    pub output_mode: OutputMode,
    pub mutants: Vec<MutantRecord>,
    pub summary: ReportSummary,
}

impl MutationReport {
    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn to_json(&self) -> Vec<u8> {
        serialize_document(&serde_json::to_value(self).expect("report serializes"))
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("source agent failed to load: {0}")]
    SourceLoadFailed(#[from] LoadError),
    #[error("output root {path} is unusable: {reason}")]
    OutputUnwritable { path: PathBuf, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Digest over the whole source tree: stable fingerprint for the report.
pub fn source_tree_digest(model: &ChatbotModel) -> String {
    let mut lines = String::new();
    for (path, file) in &model.source_map.files {
        lines.push_str(path);
        lines.push(' ');
        lines.push_str(&sha256_hex(&file.original));
        lines.push('\n');
    }
    sha256_hex(lines.as_bytes())
}

/// Runs a full mutation campaign and writes `report.json` under the output
/// root. Failures on individual mutants are recorded in their report rows
/// and do not abort the run.
pub fn run_campaign(config: &MutationConfig) -> Result<MutationReport, CampaignError> {
    let operators = config.operators.resolve()?;

    let source_abs = fs::canonicalize(&config.source_root).unwrap_or_else(|_| config.source_root.clone());
    let output_abs = fs::canonicalize(&config.output_root).unwrap_or_else(|_| config.output_root.clone());
    if source_abs == output_abs {
        return Err(CampaignError::ConfigInvalid(
            "source_root and output_root must differ".to_string(),
        ));
    }

    let model = load_agent(&config.source_root)?;

    if config.output_root.exists() {
        let occupied = fs::read_dir(&config.output_root)
            .map(|mut d| d.next().is_some())
            .unwrap_or(false);
        if occupied && !config.overwrite {
            return Err(CampaignError::OutputUnwritable {
                path: config.output_root.clone(),
                reason: "directory is not empty (pass overwrite)".to_string(),
            });
        }
    }
    fs::create_dir_all(&config.output_root).map_err(|source| CampaignError::Io {
        path: config.output_root.clone(),
        source,
    })?;

    let mut mutants = Vec::new();
    let mut per_operator: BTreeMap<String, usize> = BTreeMap::new();
    let mut per_category: BTreeMap<String, usize> = BTreeMap::new();
    let mut failed_total = 0usize;

    for op in operators {
        let mut descriptors = enumerate_targets(&model, op, config.seed);
        if let Some(cap) = config.max_mutants {
            descriptors.truncate(cap);
        }
        for descriptor in descriptors {
            let record = generate_mutant(&model, config, &descriptor);
            if record.error.is_some() {
                failed_total += 1;
            }
            *per_operator.entry(op.as_str().to_string()).or_default() += 1;
            *per_category
                .entry(descriptor.category().heading().to_string())
                .or_default() += 1;
            mutants.push(record);
        }
    }

    let report = MutationReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        source_root: config.source_root.to_string_lossy().into_owned(),
        source_digest: source_tree_digest(&model),
        output_mode: config.output_mode,
        summary: ReportSummary {
            generated_total: mutants.len(),
            failed_total,
            per_operator,
            per_category,
        },
        mutants,
    };

    let report_path = config.output_root.join(REPORT_FILE);
    fs::write(&report_path, report.to_json()).map_err(|source| CampaignError::Io {
        path: report_path,
        source,
    })?;
    Ok(report)
}

fn generate_mutant(
    model: &ChatbotModel,
    config: &MutationConfig,
    descriptor: &MutationDescriptor,
) -> MutantRecord {
    let output_dir = descriptor.mutant_id.clone();
    let dest = config.output_root.join(&output_dir);

    let mut record = MutantRecord {
        descriptor: descriptor.clone(),
        output_dir,
        files_written: Vec::new(),
        files_deleted: Vec::new(),
        error: None,
    };

    let (mutant, dirty) = match apply(model, descriptor) {
        Ok(result) => result,
        Err(err) => {
            record.error = Some(err.to_string());
            return record;
        }
    };

    if config.overwrite && dest.exists() {
        let _ = fs::remove_dir_all(&dest);
    }
    match save_agent(&mutant, &dest, config.output_mode, &dirty, config.overwrite) {
        Ok(manifest) => {
            record.files_written = manifest.written;
            record.files_deleted = manifest.deleted;
        }
        Err(err @ SaveError::DestinationNotEmpty(_)) => {
            record.error = Some(err.to_string());
        }
        Err(err) => {
            record.error = Some(err.to_string());
        }
    }
    record
}
