//! Kill-rate scoring of a generated campaign against a conversation suite.
//!
//! Every mutant is reloaded from disk and run against the suite. A mutant is
//! killed when at least one script that passes on the original fails on it;
//! survivors are probed for behavioral equivalence and flagged as candidates
//! when the probe finds no distinguishing conversation. Mutants that fail to
//! load are reported as invalid and excluded from the kill denominator.

use super::{MutantRecord, MutationReport};
use crate::dialogflow::{build_model, load_agent, source_map_from_bytes, OutputMode};
use crate::model::ChatbotModel;
use crate::operators::Category;
use crate::simulator::{equivalence_probe, run_suite, ConvoScript, ProbeVerdict};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use thiserror::Error;

/// Default exploration depth for the equivalence probe during scoring.
pub const DEFAULT_PROBE_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutantVerdict {
    /// At least one suite script failed on the mutant.
    Killed,
    /// Every script passed.
    Survived,
    /// The mutant could not be generated or loaded; excluded from scoring.
    Invalid,
}

/// Per-mutant scoring outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub mutant_id: String,
    pub operator: String,
    pub category: String,
    pub verdict: MutantVerdict,
    /// Survivor the probe could not distinguish from the original.
    pub likely_equivalent: bool,
    /// First suite script that failed, for killed mutants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killed_by: Option<String>,
    /// Distinguishing conversation in script format, for survivors the probe
    /// told apart; drop it into a suite directory to strengthen the tests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One row of the category matrix: killed / equivalent / generated (%).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryScore {
    pub category: String,
    pub killed: usize,
    pub equivalent: usize,
    pub generated: usize,
    pub invalid: usize,
    /// Killed over (generated − equivalent − invalid), rounded to the nearest
    /// integer percent; absent when the denominator is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub percent_killed: Option<i64>,
}

impl CategoryScore {
    fn compute(category: String, rows: &[&ScoreRow]) -> Self {
        let generated = rows.len();
        let killed = rows
            .iter()
            .filter(|r| r.verdict == MutantVerdict::Killed)
            .count();
        let equivalent = rows.iter().filter(|r| r.likely_equivalent).count();
        let invalid = rows
            .iter()
            .filter(|r| r.verdict == MutantVerdict::Invalid)
            .count();
        let denominator = generated.saturating_sub(equivalent + invalid);
        let percent_killed = if denominator > 0 {
            Some((killed as f64 * 100.0 / denominator as f64).round() as i64)
        } else {
            None
        };
        CategoryScore {
            category,
            killed,
            equivalent,
            generated,
            invalid,
            percent_killed,
        }
    }

    /// `killed/equivalent/generated (pct%)`, `-` for empty categories.
    pub fn cell(&self) -> String {
        if self.generated == 0 {
            return "-".to_string();
        }
        let pct = match self.percent_killed {
            Some(p) => format!("{p}%"),
            None => "-".to_string(),
        };
        format!(
            "{}/{}/{} ({})",
            self.killed, self.equivalent, self.generated, pct
        )
    }
}

/// Scoring result: per-mutant rows plus the category matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub agent: String,
    pub seed: u64,
    pub probe_depth: usize,
    pub rows: Vec<ScoreRow>,
    /// One entry per operator category, then the total.
    pub categories: Vec<CategoryScore>,
}

impl ScoreTable {
    pub fn category(&self, heading: &str) -> Option<&CategoryScore> {
        self.categories.iter().find(|c| c.category == heading)
    }

    pub fn to_json(&self) -> Vec<u8> {
        crate::dialogflow::serialize_document(
            &serde_json::to_value(self).expect("table serializes"),
        )
    }
}

#[derive(Debug, Clone)]
pub struct ScoreOptions {
    pub probe_depth: usize,
    /// Worker threads; results are assembled in report order regardless.
    pub jobs: usize,
    /// Overrides the source root recorded in the report.
    pub source_root: Option<PathBuf>,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self {
            probe_depth: DEFAULT_PROBE_DEPTH,
            jobs: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            source_root: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("suite fails on the original agent: {}", format_failures(.0))]
    SuiteFailsOnOriginal(Vec<(String, String)>),
    #[error("source agent failed to load: {0}")]
    SourceLoadFailed(#[from] crate::dialogflow::LoadError),
    #[error("suite is empty")]
    EmptySuite,
}

fn format_failures(failures: &[(String, String)]) -> String {
    failures
        .iter()
        .map(|(name, detail)| format!("{name} ({detail})"))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Scores every mutant of `report` (rooted at `output_root`) against the
/// suite. The suite must pass on the original agent first.
pub fn score_campaign(
    report: &MutationReport,
    output_root: &Path,
    suite: &[ConvoScript],
    options: &ScoreOptions,
) -> Result<ScoreTable, ScoreError> {
    if suite.is_empty() {
        return Err(ScoreError::EmptySuite);
    }
    let source_root = options
        .source_root
        .clone()
        .unwrap_or_else(|| PathBuf::from(&report.source_root));
    let original = load_agent(&source_root)?;

    let baseline = run_suite(&original, suite);
    let failures: Vec<(String, String)> = baseline
        .iter()
        .filter_map(|outcome| {
            outcome.failure.as_ref().map(|f| {
                (
                    outcome.script.clone(),
                    format!(
                        "turn {}: expected {:?}, got {:?}",
                        f.turn_index, f.expected, f.actual
                    ),
                )
            })
        })
        .collect();
    if !failures.is_empty() {
        return Err(ScoreError::SuiteFailsOnOriginal(failures));
    }

    let slots: Mutex<Vec<Option<ScoreRow>>> = Mutex::new(vec![None; report.mutants.len()]);
    let next: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);
    let workers = options.jobs.max(1).min(report.mutants.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if index >= report.mutants.len() {
                    break;
                }
                let row = score_one(
                    &original,
                    &source_root,
                    output_root,
                    report.output_mode,
                    &report.mutants[index],
                    suite,
                    options.probe_depth,
                );
                slots.lock().expect("no poisoned workers")[index] = Some(row);
            });
        }
    });

    let rows: Vec<ScoreRow> = slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|slot| slot.expect("every index scored"))
        .collect();

    let mut categories = Vec::new();
    for cat in Category::ALL {
        let heading = cat.heading();
        let members: Vec<&ScoreRow> = rows.iter().filter(|r| r.category == heading).collect();
        categories.push(CategoryScore::compute(heading.to_string(), &members));
    }
    categories.push(CategoryScore::compute(
        "Total".to_string(),
        &rows.iter().collect::<Vec<_>>(),
    ));

    Ok(ScoreTable {
        agent: original.name.clone(),
        seed: report.seed,
        probe_depth: options.probe_depth,
        rows,
        categories,
    })
}

fn score_one(
    original: &ChatbotModel,
    source_root: &Path,
    output_root: &Path,
    mode: OutputMode,
    record: &MutantRecord,
    suite: &[ConvoScript],
    probe_depth: usize,
) -> ScoreRow {
    let mut row = ScoreRow {
        mutant_id: record.descriptor.mutant_id.clone(),
        operator: record.descriptor.operator.as_str().to_string(),
        category: record.descriptor.category().heading().to_string(),
        verdict: MutantVerdict::Invalid,
        likely_equivalent: false,
        killed_by: None,
        witness: None,
        error: None,
    };

    if let Some(error) = &record.error {
        row.error = Some(error.clone());
        return row;
    }

    let mutant_dir = output_root.join(&record.output_dir);
    let mutant = match load_mutant(source_root, &mutant_dir, mode, record) {
        Ok(model) => model,
        Err(error) => {
            row.error = Some(error);
            return row;
        }
    };

    let outcomes = run_suite(&mutant, suite);
    if let Some(first_failure) = outcomes.iter().find(|o| !o.passed()) {
        row.verdict = MutantVerdict::Killed;
        row.killed_by = Some(first_failure.script.clone());
        return row;
    }

    row.verdict = MutantVerdict::Survived;
    let probe = equivalence_probe(original, &mutant, probe_depth);
    match probe.verdict {
        ProbeVerdict::Distinguished { witness } => {
            row.witness = Some(witness.to_text());
        }
        ProbeVerdict::LikelyEquivalent => {
            row.likely_equivalent = true;
        }
    }
    row
}

/// Reloads one mutant of a campaign by id, resolving the source root from the
/// report unless overridden.
pub fn reload_mutant(
    report: &MutationReport,
    output_root: &Path,
    mutant_id: &str,
    options: &ScoreOptions,
) -> Result<ChatbotModel, String> {
    let record = report
        .mutants
        .iter()
        .find(|m| m.descriptor.mutant_id == mutant_id)
        .ok_or_else(|| format!("mutant {mutant_id:?} not in report"))?;
    let source_root = options
        .source_root
        .clone()
        .unwrap_or_else(|| PathBuf::from(&report.source_root));
    load_mutant(
        &source_root,
        &output_root.join(&record.output_dir),
        report.output_mode,
        record,
    )
}

/// Reconstructs a mutant model from disk. Full-mode mutants are standalone
/// agent directories; modified-only mutants overlay the source tree, with
/// the report row supplying the deletions a sparse directory cannot express.
fn load_mutant(
    source_root: &Path,
    mutant_dir: &Path,
    mode: OutputMode,
    record: &MutantRecord,
) -> Result<ChatbotModel, String> {
    match mode {
        OutputMode::Full => load_agent(mutant_dir).map_err(|e| e.to_string()),
        OutputMode::ModifiedOnly => {
            let mut raw = read_tree(source_root)?;
            for deleted in &record.files_deleted {
                raw.remove(deleted);
            }
            for (rel, bytes) in read_tree(mutant_dir)? {
                raw.insert(rel, bytes);
            }
            let fallback = source_root
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "agent".to_string());
            let source_map = source_map_from_bytes(raw, &fallback).map_err(|e| e.to_string())?;
            build_model(source_map).map_err(|e| e.to_string())
        }
    }
}

fn read_tree(root: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    fn walk(
        root: &Path,
        dir: &Path,
        out: &mut BTreeMap<String, Vec<u8>>,
    ) -> Result<(), String> {
        for entry in fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))? {
            let entry = entry.map_err(|e| format!("{}: {e}", dir.display()))?;
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path
                    .strip_prefix(root)
                    .expect("under root")
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/");
                let bytes = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                out.insert(rel, bytes);
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out)?;
    Ok(out)
}
