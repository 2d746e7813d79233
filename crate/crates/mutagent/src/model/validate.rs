//! Meta-model invariant checks.
//!
//! `validate` is total: it reports violations instead of failing, because
//! mutant models are expected to break invariants and still need to load,
//! serialize and run.

use super::{ActionKind, ChatbotModel, EntityKind, Locator, MAX_PRIORITY};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    DuplicateIntentName,
    DuplicateEntityName,
    DefaultLanguageNotSupported,
    NoSupportedLanguages,
    PriorityOutOfRange,
    DuplicateParameterName,
    EmptyParameterName,
    EmptyIntentName,
    EmptyEntityName,
    EmptyOutputContextName,
    NegativeLifespan,
    DanglingAlias,
    AliasWithoutEntityRef,
    EmptyTrainingPhrase,
    SimpleEntityWithoutEntries,
    EmptySynonyms,
    TextActionWithoutVariants,
    PromptsOnOptionalParameter,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One invariant violation, located at the offending element.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub locator: Locator,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind, self.locator, self.message)
    }
}

fn violation(kind: ViolationKind, locator: &Locator, message: impl Into<String>) -> Violation {
    Violation {
        kind,
        locator: locator.clone(),
        message: message.into(),
    }
}

/// Checks every meta-model invariant and returns all violations found.
/// An empty result means the model is well-formed.
pub fn validate(model: &ChatbotModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let agent_locator = Locator::file_root("agent.json");

    if model.supported_languages.is_empty() {
        out.push(violation(
            ViolationKind::NoSupportedLanguages,
            &agent_locator,
            "agent declares no supported languages",
        ));
    } else if !model.supports_language(&model.default_language) {
        out.push(violation(
            ViolationKind::DefaultLanguageNotSupported,
            &agent_locator,
            format!(
                "default language {:?} is not among the supported languages",
                model.default_language
            ),
        ));
    }

    let mut seen_intents = BTreeSet::new();
    for intent in &model.intents {
        if intent.name.is_empty() {
            out.push(violation(
                ViolationKind::EmptyIntentName,
                &intent.locator,
                "intent has no name",
            ));
        } else if !seen_intents.insert(intent.name.clone()) {
            out.push(violation(
                ViolationKind::DuplicateIntentName,
                &intent.locator,
                format!("intent name {:?} is used more than once", intent.name),
            ));
        }

        if intent.priority < 0 || intent.priority > MAX_PRIORITY {
            out.push(violation(
                ViolationKind::PriorityOutOfRange,
                &intent.locator,
                format!("priority {} outside [0, {MAX_PRIORITY}]", intent.priority),
            ));
        }

        let mut seen_params = BTreeSet::new();
        for param in &intent.parameters {
            if param.name.is_empty() {
                out.push(violation(
                    ViolationKind::EmptyParameterName,
                    &param.locator,
                    format!("parameter of intent {:?} has no name", intent.name),
                ));
            } else if !seen_params.insert(param.name.clone()) {
                out.push(violation(
                    ViolationKind::DuplicateParameterName,
                    &param.locator,
                    format!(
                        "parameter name {:?} repeats within intent {:?}",
                        param.name, intent.name
                    ),
                ));
            }
            if !param.prompts.is_empty() && !param.is_required_effective() {
                out.push(violation(
                    ViolationKind::PromptsOnOptionalParameter,
                    &param.locator,
                    format!(
                        "parameter {:?} has prompts but is not required",
                        param.name
                    ),
                ));
            }
        }

        for ctx in &intent.output_contexts {
            if ctx.name.is_empty() {
                out.push(violation(
                    ViolationKind::EmptyOutputContextName,
                    &ctx.locator,
                    "output context has no name",
                ));
            }
            if ctx.lifespan < 0 {
                out.push(violation(
                    ViolationKind::NegativeLifespan,
                    &ctx.locator,
                    format!("lifespan {} is negative", ctx.lifespan),
                ));
            }
        }

        for phrase in &intent.training_phrases {
            if phrase.parts.is_empty() {
                out.push(violation(
                    ViolationKind::EmptyTrainingPhrase,
                    &phrase.locator,
                    "training phrase has no parts",
                ));
            }
            for part in &phrase.parts {
                if let Some(alias) = &part.alias {
                    if part.entity_ref.is_none() {
                        out.push(violation(
                            ViolationKind::AliasWithoutEntityRef,
                            &phrase.locator,
                            format!("part aliased {alias:?} carries no entity reference"),
                        ));
                    }
                    if intent.parameter(alias).is_none() {
                        out.push(violation(
                            ViolationKind::DanglingAlias,
                            &phrase.locator,
                            format!(
                                "alias {:?} does not resolve to a parameter of intent {:?}",
                                alias, intent.name
                            ),
                        ));
                    }
                }
            }
        }

        for action in &intent.responses {
            if action.kind == ActionKind::Text && action.text_variants.is_empty() {
                out.push(violation(
                    ViolationKind::TextActionWithoutVariants,
                    &action.locator,
                    "text action carries no variants",
                ));
            }
        }
    }

    let mut seen_entities = BTreeSet::new();
    for entity in &model.entities {
        if entity.name.is_empty() {
            out.push(violation(
                ViolationKind::EmptyEntityName,
                &entity.locator,
                "entity has no name",
            ));
        } else if !seen_entities.insert(entity.name.clone()) {
            out.push(violation(
                ViolationKind::DuplicateEntityName,
                &entity.locator,
                format!("entity name {:?} is used more than once", entity.name),
            ));
        }
        if entity.kind == EntityKind::Simple {
            if entity.entries.is_empty() {
                out.push(violation(
                    ViolationKind::SimpleEntityWithoutEntries,
                    &entity.locator,
                    format!("simple entity {:?} has no entries", entity.name),
                ));
            }
            for entry in &entity.entries {
                if entry.synonyms.is_empty() {
                    out.push(violation(
                        ViolationKind::EmptySynonyms,
                        &entry.locator,
                        format!("entry {:?} lists no synonyms", entry.value),
                    ));
                }
            }
        }
    }

    out
}
