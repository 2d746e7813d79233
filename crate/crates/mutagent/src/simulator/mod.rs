//! Rule-based conversation simulator.
//!
//! A deterministic, desk-scale stand-in for the hosted NLU service: intents
//! match when a training phrase equals the utterance after normalization
//! (case-fold, trim, collapse whitespace), with entity-typed phrase parts
//! acting as wildcards over the entity's entry values and synonyms. Contexts
//! gate matching and decay by one lifespan unit per turn. Required parameters
//! missing from the utterance are slot-filled through their prompts.
//!
//! Everything here is total and deterministic: same model, same utterance
//! sequence, same responses. Response variants are never randomized (the
//! first variant is used), because scoring needs reproducible verdicts.

mod convo;
mod probe;

pub use convo::{
    load_suite, parse_script, run_convo, run_suite, ConvoScript, Expectation, ScriptError,
    SuiteError, TestOutcome, Turn, TurnFailure, Verdict,
};
pub use probe::{equivalence_probe, probe_alphabet, ProbeReport, ProbeVerdict, PROBE_ALPHABET_CAP};

use crate::model::{ActionKind, ChatbotModel, EntityDef, EntityKind, Intent, TrainingPhrase};
use std::collections::BTreeMap;

/// Placeholder response for actions that would call out to a webhook.
pub const WEBHOOK_PLACEHOLDER: &str = "[webhook]";

/// Mutable state of one conversation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversationState {
    /// Language responses are rendered in.
    pub language: String,
    /// Lowercased context name → remaining lifespan; contexts at 0 are
    /// evicted, so every stored lifespan is >= 1.
    pub active_contexts: BTreeMap<String, i64>,
    /// Required parameter currently being asked for.
    pub pending_slot: Option<PendingSlot>,
    /// Parameter values collected over the whole conversation.
    pub collected_params: BTreeMap<String, String>,
    pub turn_counter: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PendingSlot {
    pub intent: String,
    pub parameter: String,
}

impl ConversationState {
    pub fn new(language: impl Into<String>) -> Self {
        Self {
            language: language.into(),
            active_contexts: BTreeMap::new(),
            pending_slot: None,
            collected_params: BTreeMap::new(),
            turn_counter: 0,
        }
    }

    pub fn for_model(model: &ChatbotModel) -> Self {
        Self::new(model.default_language.clone())
    }

    fn context_active(&self, name: &str) -> bool {
        self.active_contexts.contains_key(&name.to_lowercase())
    }

    /// Behavioral fingerprint: everything that influences future responses.
    /// The turn counter is bookkeeping and deliberately excluded.
    pub(crate) fn behavior_key(&self) -> StateKey {
        (
            self.active_contexts.clone(),
            self.pending_slot.clone(),
            self.collected_params.clone(),
        )
    }
}

pub(crate) type StateKey = (
    BTreeMap<String, i64>,
    Option<PendingSlot>,
    BTreeMap<String, String>,
);

/// Result of matching one utterance against the model.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub matched_intent: Option<String>,
    pub extracted_params: BTreeMap<String, String>,
    pub used_fallback: bool,
    /// Texts the intent would produce on completion, in the state language.
    pub response_texts: Vec<String>,
    pub activated_contexts: Vec<(String, i64)>,
}

impl MatchResult {
    fn empty() -> Self {
        Self {
            matched_intent: None,
            extracted_params: BTreeMap::new(),
            used_fallback: false,
            response_texts: Vec::new(),
            activated_contexts: Vec::new(),
        }
    }
}

pub(crate) fn normalize_tokens(text: &str) -> Vec<String> {
    text.trim()
        .to_lowercase()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// Phrase part sequence compiled for matching.
enum Segment<'a> {
    Literal(Vec<String>),
    Slot {
        alias: Option<&'a str>,
        entity: Option<&'a EntityDef>,
    },
}

fn compile_phrase<'a>(model: &'a ChatbotModel, phrase: &'a TrainingPhrase) -> Vec<Segment<'a>> {
    let mut segments = Vec::new();
    for part in &phrase.parts {
        match &part.entity_ref {
            Some(entity_ref) => {
                let entity = model
                    .entity(entity_ref.trim_start_matches('@'))
                    .filter(|e| e.kind == EntityKind::Simple);
                segments.push(Segment::Slot {
                    alias: part.alias.as_deref(),
                    entity,
                });
            }
            None => {
                let tokens = normalize_tokens(&part.text);
                if !tokens.is_empty() {
                    segments.push(Segment::Literal(tokens));
                }
            }
        }
    }
    segments
}

/// Anchored match of phrase segments against utterance tokens. Slots typed by
/// a simple entity match that entity's surface forms (value or synonym) and
/// bind the entry's canonical value; any other slot matches a non-empty token
/// span, shortest first, and binds the raw span.
fn match_segments(
    segments: &[Segment<'_>],
    tokens: &[String],
    bindings: &mut Vec<(String, String)>,
) -> bool {
    match segments.split_first() {
        None => tokens.is_empty(),
        Some((Segment::Literal(lit), rest)) => {
            if tokens.len() >= lit.len() && &tokens[..lit.len()] == lit.as_slice() {
                match_segments(rest, &tokens[lit.len()..], bindings)
            } else {
                false
            }
        }
        Some((Segment::Slot { alias, entity }, rest)) => {
            if let Some(entity) = entity {
                for entry in &entity.entries {
                    for surface in entry.surface_forms() {
                        let surface_tokens = normalize_tokens(surface);
                        if surface_tokens.is_empty()
                            || tokens.len() < surface_tokens.len()
                            || tokens[..surface_tokens.len()] != surface_tokens[..]
                        {
                            continue;
                        }
                        let before = bindings.len();
                        if let Some(alias) = alias {
                            bindings.push(((*alias).to_string(), entry.value.clone()));
                        }
                        if match_segments(rest, &tokens[surface_tokens.len()..], bindings) {
                            return true;
                        }
                        bindings.truncate(before);
                    }
                }
                false
            } else {
                for take in 1..=tokens.len() {
                    let before = bindings.len();
                    if let Some(alias) = alias {
                        bindings.push(((*alias).to_string(), tokens[..take].join(" ")));
                    }
                    if match_segments(rest, &tokens[take..], bindings) {
                        return true;
                    }
                    bindings.truncate(before);
                }
                false
            }
        }
    }
}

fn phrase_match(
    model: &ChatbotModel,
    intent: &Intent,
    tokens: &[String],
) -> Option<BTreeMap<String, String>> {
    for lang in &model.supported_languages {
        for phrase in intent.phrases_for(lang) {
            let segments = compile_phrase(model, phrase);
            if segments.is_empty() {
                continue;
            }
            let mut bindings = Vec::new();
            if match_segments(&segments, tokens, &mut bindings) {
                let mut map = BTreeMap::new();
                for (alias, value) in bindings {
                    map.entry(alias).or_insert(value);
                }
                return Some(map);
            }
        }
    }
    None
}

fn contexts_satisfied(state: &ConversationState, intent: &Intent) -> bool {
    intent
        .input_contexts
        .iter()
        .all(|ctx| state.context_active(&ctx.name))
}

/// Highest priority wins; ties break on lexicographic intent name.
fn pick_best(mut candidates: Vec<&Intent>) -> Option<&Intent> {
    candidates.sort_by(|a, b| b.priority.cmp(&a.priority).then(a.name.cmp(&b.name)));
    candidates.into_iter().next()
}

/// Matches one utterance: regular intents first (gated by their input
/// contexts), then the fallback intent when nothing matched. Fallback intents
/// never match through their phrases; their phrase files hold negative
/// examples.
pub fn match_intent(
    model: &ChatbotModel,
    state: &ConversationState,
    utterance: &str,
) -> MatchResult {
    match_intent_ref(model, state, utterance).1
}

/// As [`match_intent`], also handing back the winning intent itself so
/// callers act on the matched object rather than its (possibly duplicated,
/// under mutation) name.
fn match_intent_ref<'a>(
    model: &'a ChatbotModel,
    state: &ConversationState,
    utterance: &str,
) -> (Option<&'a Intent>, MatchResult) {
    let tokens = normalize_tokens(utterance);

    let mut matched: Vec<(&Intent, BTreeMap<String, String>)> = Vec::new();
    for intent in &model.intents {
        if intent.is_fallback_effective() || !contexts_satisfied(state, intent) {
            continue;
        }
        if let Some(bindings) = phrase_match(model, intent, &tokens) {
            matched.push((intent, bindings));
        }
    }

    if let Some(best) = pick_best(matched.iter().map(|(i, _)| *i).collect()) {
        let extracted = matched
            .iter()
            .find(|(i, _)| std::ptr::eq(*i, best))
            .map(|(_, b)| b.clone())
            .unwrap_or_default();
        let mut merged = state.collected_params.clone();
        merged.extend(extracted.clone());
        let result = MatchResult {
            matched_intent: Some(best.name.clone()),
            response_texts: render_responses(best, &state.language, &merged),
            activated_contexts: output_context_pairs(best),
            extracted_params: extracted,
            used_fallback: false,
        };
        return (Some(best), result);
    }

    let fallbacks: Vec<&Intent> = model
        .intents
        .iter()
        .filter(|i| i.is_fallback_effective() && contexts_satisfied(state, i))
        .collect();
    if let Some(fallback) = pick_best(fallbacks) {
        let result = MatchResult {
            matched_intent: Some(fallback.name.clone()),
            extracted_params: BTreeMap::new(),
            used_fallback: true,
            response_texts: render_responses(fallback, &state.language, &state.collected_params),
            activated_contexts: output_context_pairs(fallback),
        };
        return (Some(fallback), result);
    }

    (None, MatchResult::empty())
}

fn output_context_pairs(intent: &Intent) -> Vec<(String, i64)> {
    intent
        .output_contexts
        .iter()
        .filter(|c| !c.name.is_empty())
        .map(|c| (c.name.clone(), c.lifespan))
        .collect()
}

/// Renders the intent's responses in `lang`: first variant of each Text
/// action with `$param` references substituted; webhook requests produce the
/// fixed placeholder; other kinds yield no text.
fn render_responses(intent: &Intent, lang: &str, params: &BTreeMap<String, String>) -> Vec<String> {
    let mut texts = Vec::new();
    for action in intent.responses_for(lang) {
        match action.kind {
            ActionKind::Text => {
                if let Some(first) = action.first_text() {
                    texts.push(substitute_params(first, params));
                }
            }
            ActionKind::HttpRequest => texts.push(WEBHOOK_PLACEHOLDER.to_string()),
            _ => {}
        }
    }
    texts
}

/// Replaces `$name` references with collected values; unresolved references
/// stay verbatim.
pub fn substitute_params(text: &str, params: &BTreeMap<String, String>) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((at, c)) = chars.next() {
        if c != '$' {
            out.push(c);
            continue;
        }
        let rest = &text[at + 1..];
        let len = rest
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '-')
            .count();
        let name: String = rest.chars().take(len).collect();
        match params.get(&name) {
            Some(value) if len > 0 => {
                out.push_str(value);
                for _ in 0..len {
                    chars.next();
                }
            }
            _ => out.push('$'),
        }
    }
    out
}

/// First prompt for a parameter: conversation language, then the agent
/// default, then any language. `None` when the parameter has no prompts left,
/// in which case the bot waits silently.
fn prompt_text(param: &crate::model::Parameter, lang: &str, default_lang: &str) -> Option<String> {
    param
        .prompts_for(lang)
        .next()
        .or_else(|| param.prompts_for(default_lang).next())
        .or_else(|| param.prompts.first().map(|(_, text)| text.as_str()))
        .map(str::to_string)
}

/// First required parameter without a collected value, in declaration order.
fn next_unfilled<'a>(
    intent: &'a Intent,
    collected: &BTreeMap<String, String>,
) -> Option<&'a crate::model::Parameter> {
    intent
        .parameters
        .iter()
        .find(|p| p.is_required_effective() && !collected.contains_key(&p.name))
}

/// Slot answers for simple-entity parameters must be one of the entity's
/// surface forms; anything non-empty fills a system-typed slot.
fn fill_value(model: &ChatbotModel, param: &crate::model::Parameter, utterance: &str) -> Option<String> {
    let entity = model
        .entity(param.data_type.trim_start_matches('@'))
        .filter(|e| e.kind == EntityKind::Simple);
    match entity {
        Some(entity) => {
            let tokens = normalize_tokens(utterance);
            for entry in &entity.entries {
                for surface in entry.surface_forms() {
                    if normalize_tokens(surface) == tokens && !tokens.is_empty() {
                        return Some(entry.value.clone());
                    }
                }
            }
            None
        }
        None => {
            let trimmed = utterance.trim();
            if trimmed.is_empty() {
                None
            } else {
                Some(trimmed.to_string())
            }
        }
    }
}

/// Advances the conversation by one user turn and returns the bot's texts.
///
/// A pending slot consumes the utterance first; otherwise the utterance is
/// matched. A match with unfilled required parameters prompts for the first
/// one; completion renders the responses and activates output contexts. At
/// the end of every turn, pre-existing contexts that were not just refreshed
/// decay by one and expired ones are evicted.
pub fn step(model: &ChatbotModel, state: &mut ConversationState, utterance: &str) -> Vec<String> {
    let pre_existing: Vec<String> = state.active_contexts.keys().cloned().collect();
    let mut responses = Vec::new();
    let mut activated: Vec<(String, i64)> = Vec::new();

    let pending = state.pending_slot.take();
    let mut completed_intent: Option<&Intent> = None;

    if let Some(pending_slot) = pending {
        if let Some(intent) = model.intent(&pending_slot.intent) {
            let param = intent.parameter(&pending_slot.parameter);
            let filled = param.and_then(|p| fill_value(model, p, utterance));
            match (param, filled) {
                (Some(param), Some(value)) => {
                    state.collected_params.insert(param.name.clone(), value);
                    completed_intent = Some(intent);
                }
                (Some(param), None) => {
                    // Answer did not fit: repeat the prompt and keep waiting.
                    responses.extend(prompt_text(param, &state.language, &model.default_language));
                    state.pending_slot = Some(pending_slot);
                }
                (None, _) => {
                    // Parameter vanished (possible only under mutation);
                    // drop the slot and treat the turn as unmatched.
                }
            }
        }
    } else {
        let (matched_ref, matched) = match_intent_ref(model, state, utterance);
        if matched_ref.is_some() {
            state.collected_params.extend(matched.extracted_params);
            completed_intent = matched_ref;
        }
    }

    if let Some(intent) = completed_intent {
        match next_unfilled(intent, &state.collected_params) {
            Some(param) => {
                responses.extend(prompt_text(param, &state.language, &model.default_language));
                state.pending_slot = Some(PendingSlot {
                    intent: intent.name.clone(),
                    parameter: param.name.clone(),
                });
            }
            None => {
                responses = render_responses(intent, &state.language, &state.collected_params);
                activated = output_context_pairs(intent);
            }
        }
    }

    let mut refreshed = std::collections::BTreeSet::new();
    for (name, lifespan) in activated {
        let key = name.to_lowercase();
        if lifespan > 0 {
            state.active_contexts.insert(key.clone(), lifespan);
        } else {
            state.active_contexts.remove(&key);
        }
        refreshed.insert(key);
    }
    for key in pre_existing {
        if refreshed.contains(&key) {
            continue;
        }
        if let Some(lifespan) = state.active_contexts.get_mut(&key) {
            *lifespan -= 1;
            if *lifespan <= 0 {
                state.active_contexts.remove(&key);
            }
        }
    }

    state.turn_counter += 1;
    responses
}
