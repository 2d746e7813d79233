//! Scripted conversations and the verdicts they produce.
//!
//! Script file format (one file per script, `*.convo.txt`):
//!
//! ```text
//! script name
//!
//! #lang es          (optional)
//!
//! #me
//! book a suite in tokyo
//!
//! #bot
//! When?
//!
//! #bot any          (one alternative per line)
//! #bot contains     (substring match)
//! ```
//!
//! Blocks are separated by blank lines. Turns alternate, starting with a
//! user turn. A suite is a directory of script files, run in filename order.

use super::{step, ConversationState};
use crate::model::ChatbotModel;
use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::path::Path;
use thiserror::Error;

/// Expectation on one bot response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Exact(String),
    AnyOf(Vec<String>),
    Contains(String),
}

impl Expectation {
    pub fn matches(&self, actual: &str) -> bool {
        match self {
            Expectation::Exact(expected) => actual == expected,
            Expectation::AnyOf(options) => options.iter().any(|o| o == actual),
            Expectation::Contains(needle) => actual.contains(needle.as_str()),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Exact(s) => write!(f, "{s}"),
            Expectation::AnyOf(options) => write!(f, "any of: {}", options.join(" | ")),
            Expectation::Contains(s) => write!(f, "contains: {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Turn {
    Me(String),
    Bot(Expectation),
}

/// A scripted conversation with expectations on the bot's responses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvoScript {
    pub name: String,
    /// Conversation language; the agent's default when absent.
    pub language: Option<String>,
    pub turns: Vec<Turn>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScriptError {
    #[error("script is empty")]
    Empty,
    #[error("script {0:?} has no turns")]
    NoTurns(String),
    #[error("unknown directive {0:?}")]
    UnknownDirective(String),
    #[error("block without a #me/#bot directive: {0:?}")]
    MissingDirective(String),
    #[error("first turn must be #me")]
    FirstTurnNotMe,
    #[error("turns must alternate between #me and #bot")]
    NotAlternating,
    #[error("#me turn has no utterance")]
    EmptyUtterance,
}

/// Parses one script file's contents.
pub fn parse_script(text: &str) -> Result<ConvoScript, ScriptError> {
    let mut blocks: Vec<Vec<&str>> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line.trim_end());
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    if blocks.is_empty() {
        return Err(ScriptError::Empty);
    }

    let mut header = blocks[0].iter();
    let name = header.next().expect("non-empty block").trim().to_string();
    let mut language = None;
    let mut turns = Vec::new();

    // The name may share its block with the first directives.
    let leftover: Vec<&str> = header.copied().collect();
    let mut block_iter = std::iter::once(leftover)
        .chain(blocks.into_iter().skip(1))
        .filter(|b| !b.is_empty());

    let mut parse_block = |lines: Vec<&str>| -> Result<(), ScriptError> {
        let (directive, rest) = lines.split_first().expect("non-empty block");
        let body: Vec<String> = rest.iter().map(|l| l.trim().to_string()).collect();
        match *directive {
            "#me" => {
                if body.is_empty() {
                    return Err(ScriptError::EmptyUtterance);
                }
                turns.push(Turn::Me(body.join(" ")));
            }
            "#bot" => turns.push(Turn::Bot(Expectation::Exact(body.join("\n")))),
            "#bot any" => turns.push(Turn::Bot(Expectation::AnyOf(body))),
            "#bot contains" => turns.push(Turn::Bot(Expectation::Contains(body.join(" ")))),
            other if other.starts_with("#lang") => {
                language = other
                    .strip_prefix("#lang")
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty());
            }
            other if other.starts_with('#') => {
                return Err(ScriptError::UnknownDirective(other.to_string()));
            }
            other => return Err(ScriptError::MissingDirective(other.to_string())),
        }
        Ok(())
    };

    for block in &mut block_iter {
        parse_block(block)?;
    }

    if turns.is_empty() {
        return Err(ScriptError::NoTurns(name));
    }
    for (i, turn) in turns.iter().enumerate() {
        let expect_me = i % 2 == 0;
        match (expect_me, turn) {
            (true, Turn::Me(_)) | (false, Turn::Bot(_)) => {}
            (true, Turn::Bot(_)) => {
                return Err(if i == 0 {
                    ScriptError::FirstTurnNotMe
                } else {
                    ScriptError::NotAlternating
                });
            }
            (false, Turn::Me(_)) => return Err(ScriptError::NotAlternating),
        }
    }

    Ok(ConvoScript {
        name,
        language,
        turns,
    })
}

impl ConvoScript {
    /// Renders the script back into the `*.convo.txt` file format, parseable
    /// by [`parse_script`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.name);
        out.push('\n');
        if let Some(lang) = &self.language {
            out.push_str(&format!("\n#lang {lang}\n"));
        }
        for turn in &self.turns {
            match turn {
                Turn::Me(utterance) => out.push_str(&format!("\n#me\n{utterance}\n")),
                Turn::Bot(Expectation::Exact(text)) => {
                    out.push_str(&format!("\n#bot\n{text}\n"));
                }
                Turn::Bot(Expectation::AnyOf(options)) => {
                    out.push_str("\n#bot any\n");
                    for option in options {
                        out.push_str(option);
                        out.push('\n');
                    }
                }
                Turn::Bot(Expectation::Contains(needle)) => {
                    out.push_str(&format!("\n#bot contains\n{needle}\n"));
                }
            }
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read suite directory {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("script {path}: {source}")]
    Script {
        path: std::path::PathBuf,
        source: ScriptError,
    },
    #[error("no *.convo.txt files under {0}")]
    EmptySuite(std::path::PathBuf),
}

/// Loads every `*.convo.txt` under `dir`, in filename order.
pub fn load_suite(dir: impl AsRef<Path>) -> Result<Vec<ConvoScript>, SuiteError> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|source| SuiteError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .map(|n| n.to_string_lossy().ends_with(".convo.txt"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(SuiteError::EmptySuite(dir.to_path_buf()));
    }
    let mut scripts = Vec::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|source| SuiteError::Io {
            path: path.clone(),
            source,
        })?;
        let script = parse_script(&text).map_err(|source| SuiteError::Script {
            path: path.clone(),
            source,
        })?;
        scripts.push(script);
    }
    Ok(scripts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Details of the first mismatched expectation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnFailure {
    /// Index of the failing turn within the script.
    pub turn_index: usize,
    pub expected: String,
    pub actual: String,
}

/// Outcome of running one script against one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub script: String,
    pub verdict: Verdict,
    pub failure: Option<TurnFailure>,
}

impl TestOutcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Runs every script against the agent, in order.
pub fn run_suite(model: &ChatbotModel, scripts: &[ConvoScript]) -> Vec<TestOutcome> {
    scripts.iter().map(|s| run_convo(model, s)).collect()
}

/// Runs a script from a fresh conversation. Bot turns consume the agent's
/// response texts in emission order; the first mismatch fails the script at
/// that turn.
pub fn run_convo(model: &ChatbotModel, script: &ConvoScript) -> TestOutcome {
    let language = script
        .language
        .clone()
        .unwrap_or_else(|| model.default_language.clone());
    let mut state = ConversationState::new(language);
    let mut queue: VecDeque<String> = VecDeque::new();

    for (turn_index, turn) in script.turns.iter().enumerate() {
        match turn {
            Turn::Me(utterance) => {
                queue.extend(step(model, &mut state, utterance));
            }
            Turn::Bot(expectation) => {
                let actual = queue.pop_front();
                let ok = actual
                    .as_deref()
                    .map(|a| expectation.matches(a))
                    .unwrap_or(false);
                if !ok {
                    return TestOutcome {
                        script: script.name.clone(),
                        verdict: Verdict::Fail,
                        failure: Some(TurnFailure {
                            turn_index,
                            expected: expectation.to_string(),
                            actual: actual.unwrap_or_else(|| "<no response>".to_string()),
                        }),
                    };
                }
            }
        }
    }

    TestOutcome {
        script: script.name.clone(),
        verdict: Verdict::Pass,
        failure: None,
    }
}
