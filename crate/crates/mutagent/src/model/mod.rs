//! Platform-agnostic chatbot meta-model.
//!
//! A [`ChatbotModel`] is the in-memory view of a conversational agent:
//! intents with their training phrases, parameters and contexts, entities,
//! supported languages, and the actions produced as responses. Conversation
//! flows are not stored; a flow edge exists wherever an output-context name
//! of one intent appears among the input contexts of another.
//!
//! The model is read-only once built. Every element carries a [`Locator`]
//! pointing back into the source documents it was parsed from, so finders
//! and mutation tooling can address the exact file location.

mod index;
mod path;
#[cfg(test)]
mod tests;
mod validate;

pub use index::{element_index, ContextDirection, ElementIndex, FlowEdge, IndexedElement};
pub use path::{DocumentPath, Locator};
pub use validate::{validate, Violation, ViolationKind};

use crate::dialogflow::SourceMap;

/// Dialogflow's default intent priority, used when an intent file omits the
/// `priority` field.
pub const DEFAULT_PRIORITY: i64 = 500_000;

/// Default context lifespan, in turns, when an output context omits one.
pub const DEFAULT_LIFESPAN: i64 = 5;

/// Upper bound of the intent priority range.
pub const MAX_PRIORITY: i64 = 1_000_000;

/// In-memory agent: the root of the meta-model.
#[derive(Debug, Clone)]
pub struct ChatbotModel {
    pub name: String,
    /// BCP-47-style short code, e.g. `en`.
    pub default_language: String,
    /// Default language first, then additional languages in declaration order.
    pub supported_languages: Vec<String>,
    /// File order (sorted by relative path).
    pub intents: Vec<Intent>,
    pub entities: Vec<EntityDef>,
    /// Per-file document trees and verbatim payloads; owned by the platform
    /// adapter and opaque to the meta-model.
    pub source_map: SourceMap,
}

impl ChatbotModel {
    pub fn intent(&self, name: &str) -> Option<&Intent> {
        self.intents.iter().find(|i| i.name == name)
    }

    pub fn entity(&self, name: &str) -> Option<&EntityDef> {
        self.entities.iter().find(|e| e.name == name)
    }

    /// Case-insensitive language membership test; codes are stored as read.
    pub fn supports_language(&self, code: &str) -> bool {
        self.supported_languages
            .iter()
            .any(|l| l.eq_ignore_ascii_case(code))
    }

    /// Flow edges induced by matching output-context names to input-context
    /// names (case-insensitive, following the platform convention).
    pub fn flows(&self) -> Vec<FlowEdge> {
        index::flows(self)
    }

    /// Structural equality ignoring the source map: same agent content
    /// regardless of where the bytes came from.
    pub fn structurally_equal(&self, other: &ChatbotModel) -> bool {
        self.name == other.name
            && self.default_language == other.default_language
            && self.supported_languages == other.supported_languages
            && self.intents == other.intents
            && self.entities == other.entities
    }
}

/// A user goal the agent recognizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Intent {
    pub name: String,
    /// Effective priority; [`DEFAULT_PRIORITY`] when the file omits it.
    pub priority: i64,
    /// Tri-state: the underlying property may be absent, which is distinct
    /// from `false` because operators exist for both flipping and removing it.
    pub is_fallback: Option<bool>,
    pub input_contexts: Vec<ContextRef>,
    pub output_contexts: Vec<OutputContext>,
    pub parameters: Vec<Parameter>,
    /// All phrases across languages, each tagged with its language, in
    /// per-language file order.
    pub training_phrases: Vec<TrainingPhrase>,
    /// All response actions, each tagged with its language.
    pub responses: Vec<Action>,
    /// Root of the intent definition file.
    pub locator: Locator,
}

impl Intent {
    pub fn is_fallback_effective(&self) -> bool {
        self.is_fallback == Some(true)
    }

    pub fn phrases_for<'a>(&'a self, lang: &'a str) -> impl Iterator<Item = &'a TrainingPhrase> + 'a {
        self.training_phrases
            .iter()
            .filter(move |p| p.language.eq_ignore_ascii_case(lang))
    }

    pub fn responses_for<'a>(&'a self, lang: &'a str) -> impl Iterator<Item = &'a Action> + 'a {
        self.responses
            .iter()
            .filter(move |a| a.language.eq_ignore_ascii_case(lang))
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

/// Reference to a context gating an intent (an input context).
#[derive(Debug, Clone, PartialEq)]
pub struct ContextRef {
    pub name: String,
    pub locator: Locator,
}

/// Context activated by an intent, with its lifespan in turns and inert
/// key-value payload.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputContext {
    /// Empty only in mutants (the name property can be removed).
    pub name: String,
    /// Effective lifespan; [`DEFAULT_LIFESPAN`] when the property is absent.
    pub lifespan: i64,
    pub parameters: Vec<(String, String)>,
    pub locator: Locator,
}

/// Slot an intent can fill from the conversation.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    /// Empty only in mutants (the name property can be removed).
    pub name: String,
    /// Entity reference (`@city`) or system-type tag (`@sys.date`).
    pub data_type: String,
    /// Value expression as written, e.g. `$date`.
    pub value_expr: String,
    pub is_required: Option<bool>,
    pub is_list: Option<bool>,
    /// `(language, prompt text)` in document order.
    pub prompts: Vec<(String, String)>,
    pub locator: Locator,
}

impl Parameter {
    pub fn is_required_effective(&self) -> bool {
        self.is_required == Some(true)
    }

    pub fn prompts_for<'a>(&'a self, lang: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.prompts
            .iter()
            .filter(move |(l, _)| l.eq_ignore_ascii_case(lang))
            .map(|(_, text)| text.as_str())
    }

    /// True when `data_type` names a platform system type rather than an
    /// agent-defined entity.
    pub fn is_system_type(&self) -> bool {
        self.data_type.starts_with("@sys.")
    }
}

/// One example sentence used to train an intent.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPhrase {
    pub parts: Vec<PhrasePart>,
    pub language: String,
    pub locator: Locator,
}

impl TrainingPhrase {
    /// Concatenation of all part texts: the full surface sentence.
    pub fn surface_text(&self) -> String {
        self.parts.iter().map(|p| p.text.as_str()).collect()
    }
}

/// Fragment of a training phrase: literal text, or an entity-typed slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PhrasePart {
    pub text: String,
    /// Parameter this slot binds to, when annotated.
    pub alias: Option<String>,
    /// Entity or system-type reference (`@city`, `@sys.date`).
    pub entity_ref: Option<String>,
}

impl PhrasePart {
    pub fn is_slot(&self) -> bool {
        self.entity_ref.is_some()
    }
}

/// Entity kinds. Only Simple entities are ever mutated; Complex and Regex
/// definitions round-trip byte-identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityKind {
    Simple,
    Complex,
    Regex,
}

/// A data type usable in conversations.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityDef {
    /// Empty only in mutants.
    pub name: String,
    pub kind: EntityKind,
    /// Parsed entries (Simple and Complex; Regex entries stay opaque).
    pub entries: Vec<EntityEntry>,
    /// Root of the entity definition file.
    pub locator: Locator,
}

/// A literal with synonyms.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityEntry {
    pub value: String,
    pub synonyms: Vec<String>,
    /// Language of the entries file this entry came from.
    pub language: String,
    pub locator: Locator,
}

impl EntityEntry {
    /// The value itself plus every synonym: everything that matches this entry.
    pub fn surface_forms(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.value.as_str()).chain(self.synonyms.iter().map(|s| s.as_str()))
    }
}

/// Response action kinds from the meta-model. Anything the platform adapter
/// cannot interpret as one of the structured kinds is carried as [`Empty`]
/// with its payload preserved verbatim.
///
/// [`Empty`]: ActionKind::Empty
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Text,
    Image,
    HttpRequest,
    HttpResponse,
    Empty,
}

/// One response message of an intent.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub kind: ActionKind,
    pub language: String,
    /// Alternative texts; non-empty for Text actions.
    pub text_variants: Vec<String>,
    /// Locator of the message object in the intent file.
    pub locator: Locator,
    /// Locators of the individual variants (one per entry of
    /// `text_variants`). For scalar `speech` values this is the single
    /// locator of the field itself.
    pub variant_locators: Vec<Locator>,
}

impl Action {
    pub fn first_text(&self) -> Option<&str> {
        if self.kind == ActionKind::Text {
            self.text_variants.first().map(|s| s.as_str())
        } else {
            None
        }
    }
}
