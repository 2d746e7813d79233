//! Behavioral equivalence probe.
//!
//! Explores conversations breadth-first over a finite utterance alphabet
//! (every training phrase with each entity-typed slot instantiated by each
//! entry value of its entity), stepping the original and the mutant in
//! lockstep. Joint states already visited are skipped, which keeps the
//! search tractable without losing distinctions: a deterministic simulator
//! behaves identically from identical state.
//!
//! A difference only counts once it is replayable: the candidate witness
//! script (user turns plus the original's responses as expectations) must
//! pass on the original and fail on the mutant. Unconfirmable differences
//! keep the search going; a mutant that survives the whole exploration is
//! reported as a likely-equivalent candidate, never as proven equivalent.

use super::convo::{run_convo, ConvoScript, Expectation, Turn};
use super::{step, ConversationState, StateKey};
use crate::model::{ChatbotModel, EntityKind};
use std::collections::{BTreeSet, VecDeque};

/// Cap on distinct alphabet utterances; beyond it the probe degrades to the
/// first utterances in sorted order and flags the truncation.
pub const PROBE_ALPHABET_CAP: usize = 200;

/// Safety bound on explored joint states, generous for desk-scale agents.
const NODE_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeVerdict {
    /// A replayable conversation tells the two agents apart.
    Distinguished { witness: ConvoScript },
    /// No distinguishing conversation found within the alphabet and depth.
    LikelyEquivalent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    /// The alphabet exceeded [`PROBE_ALPHABET_CAP`] and was truncated.
    pub alphabet_truncated: bool,
    /// Joint states expanded across all language modes.
    pub explored_states: usize,
}

impl ProbeReport {
    pub fn is_distinguished(&self) -> bool {
        matches!(self.verdict, ProbeVerdict::Distinguished { .. })
    }
}

/// Instantiates every training phrase of every intent, substituting each
/// simple-entity slot with each entry value of its entity (other slots keep
/// the phrase's own surface text). Returns normalized, sorted, deduplicated
/// utterances.
pub fn probe_alphabet(model: &ChatbotModel) -> Vec<String> {
    let mut utterances = BTreeSet::new();
    for intent in &model.intents {
        for phrase in &intent.training_phrases {
            let mut prefixes = vec![String::new()];
            for part in &phrase.parts {
                let options: Vec<String> = match &part.entity_ref {
                    Some(entity_ref) => {
                        let entity = model
                            .entity(entity_ref.trim_start_matches('@'))
                            .filter(|e| e.kind == EntityKind::Simple);
                        match entity {
                            Some(entity) if !entity.entries.is_empty() => entity
                                .entries
                                .iter()
                                .map(|e| e.value.clone())
                                .collect(),
                            _ => vec![part.text.clone()],
                        }
                    }
                    None => vec![part.text.clone()],
                };
                let mut next = Vec::with_capacity(prefixes.len() * options.len());
                for prefix in &prefixes {
                    for option in &options {
                        next.push(format!("{prefix}{option}"));
                    }
                }
                prefixes = next;
            }
            for surface in prefixes {
                let normalized = super::normalize_tokens(&surface).join(" ");
                if !normalized.is_empty() {
                    utterances.insert(normalized);
                }
            }
        }
    }
    utterances.into_iter().collect()
}

struct Node {
    utterances: Vec<String>,
    original_texts: Vec<Vec<String>>,
    original_state: ConversationState,
    mutant_state: ConversationState,
}

/// Builds the candidate witness: the user turns, with one expectation per
/// turn drawn from the original's responses in emission order (matching how
/// a script consumes the response queue).
fn build_witness(
    language: Option<&str>,
    utterances: &[String],
    per_turn_texts: &[Vec<String>],
) -> ConvoScript {
    let mut turns = Vec::new();
    let mut queue: VecDeque<String> = VecDeque::new();
    for (utterance, texts) in utterances.iter().zip(per_turn_texts) {
        turns.push(Turn::Me(utterance.clone()));
        queue.extend(texts.iter().cloned());
        if let Some(text) = queue.pop_front() {
            turns.push(Turn::Bot(Expectation::Exact(text)));
        }
    }
    ConvoScript {
        name: "probe witness".to_string(),
        language: language.map(str::to_string),
        turns,
    }
}

/// Explores up to `depth` user turns per conversation, once per language
/// mode: first with the scripts' language left unset (each agent answers in
/// its own default language), then pinned to each supported language.
pub fn equivalence_probe(
    original: &ChatbotModel,
    mutant: &ChatbotModel,
    depth: usize,
) -> ProbeReport {
    let mut alphabet = probe_alphabet(original);
    for utterance in probe_alphabet(mutant) {
        if !alphabet.contains(&utterance) {
            alphabet.push(utterance);
        }
    }
    alphabet.sort();
    let alphabet_truncated = alphabet.len() > PROBE_ALPHABET_CAP;
    alphabet.truncate(PROBE_ALPHABET_CAP);

    let mut language_modes: Vec<Option<String>> = vec![None];
    for lang in original
        .supported_languages
        .iter()
        .chain(&mutant.supported_languages)
    {
        if !language_modes
            .iter()
            .flatten()
            .any(|l| l.eq_ignore_ascii_case(lang))
        {
            language_modes.push(Some(lang.clone()));
        }
    }

    let mut explored_states = 0usize;
    for mode in &language_modes {
        let original_lang = mode
            .clone()
            .unwrap_or_else(|| original.default_language.clone());
        let mutant_lang = mode
            .clone()
            .unwrap_or_else(|| mutant.default_language.clone());

        let mut visited: BTreeSet<(StateKey, StateKey)> = BTreeSet::new();
        let mut queue: VecDeque<Node> = VecDeque::new();
        let root = Node {
            utterances: Vec::new(),
            original_texts: Vec::new(),
            original_state: ConversationState::new(original_lang),
            mutant_state: ConversationState::new(mutant_lang),
        };
        visited.insert((
            root.original_state.behavior_key(),
            root.mutant_state.behavior_key(),
        ));
        queue.push_back(root);

        while let Some(node) = queue.pop_front() {
            if node.utterances.len() >= depth || explored_states >= NODE_BUDGET {
                continue;
            }
            explored_states += 1;
            for utterance in &alphabet {
                let mut original_state = node.original_state.clone();
                let mut mutant_state = node.mutant_state.clone();
                let original_texts = step(original, &mut original_state, utterance);
                let mutant_texts = step(mutant, &mut mutant_state, utterance);

                let mut utterances = node.utterances.clone();
                utterances.push(utterance.clone());
                let mut per_turn = node.original_texts.clone();
                per_turn.push(original_texts.clone());

                if original_texts != mutant_texts {
                    let witness = build_witness(mode.as_deref(), &utterances, &per_turn);
                    if run_convo(original, &witness).passed()
                        && !run_convo(mutant, &witness).passed()
                    {
                        return ProbeReport {
                            verdict: ProbeVerdict::Distinguished { witness },
                            alphabet_truncated,
                            explored_states,
                        };
                    }
                }

                let key = (original_state.behavior_key(), mutant_state.behavior_key());
                if visited.insert(key) {
                    queue.push_back(Node {
                        utterances,
                        original_texts: per_turn,
                        original_state,
                        mutant_state,
                    });
                }
            }
        }
    }

    ProbeReport {
        verdict: ProbeVerdict::LikelyEquivalent,
        alphabet_truncated,
        explored_states,
    }
}
