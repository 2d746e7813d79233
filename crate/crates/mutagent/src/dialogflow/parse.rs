//! Builds the typed model from a [`SourceMap`]'s document trees.
//!
//! Parsing is deliberately permissive: mutants remove names, flags and whole
//! properties, and the resulting agents must still load. Missing fields fall
//! back to defaults (empty names, default priority, default lifespan) and
//! `validate` reports the damage.

use super::{FileRole, LoadError, SourceMap};
use crate::model::{
    Action, ActionKind, ChatbotModel, ContextRef, EntityDef, EntityEntry, EntityKind, Intent,
    Locator, OutputContext, Parameter, PhrasePart, TrainingPhrase, DEFAULT_LIFESPAN,
    DEFAULT_PRIORITY,
};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub fn build_model(source_map: SourceMap) -> Result<ChatbotModel, LoadError> {
    let agent_doc = source_map
        .document("agent.json")
        .ok_or_else(|| LoadError::MissingAgentManifest {
            root: PathBuf::from("<in-memory>"),
        })?;

    let default_language = agent_doc
        .get("language")
        .and_then(Value::as_str)
        .unwrap_or("en")
        .to_string();
    let mut supported_languages = vec![default_language.clone()];
    if let Some(extra) = agent_doc.get("supportedLanguages").and_then(Value::as_array) {
        for lang in extra.iter().filter_map(Value::as_str) {
            if !supported_languages
                .iter()
                .any(|l| l.eq_ignore_ascii_case(lang))
            {
                supported_languages.push(lang.to_string());
            }
        }
    }
    let name = agent_doc
        .get("displayName")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
        .unwrap_or(&source_map.fallback_name)
        .to_string();

    // Companion files grouped by stem, in path (= language) order.
    let mut usersays: BTreeMap<&str, Vec<(&str, &str, &Value)>> = BTreeMap::new();
    let mut entries: BTreeMap<&str, Vec<(&str, &str, &Value)>> = BTreeMap::new();
    for (rel, file) in &source_map.files {
        match (&file.role, &file.doc) {
            (FileRole::IntentUsersays { stem, lang }, Some(doc)) => {
                usersays.entry(stem).or_default().push((rel, lang, doc));
            }
            (FileRole::EntityEntries { stem, lang }, Some(doc)) => {
                entries.entry(stem).or_default().push((rel, lang, doc));
            }
            _ => {}
        }
    }

    let mut intents = Vec::new();
    let mut entities = Vec::new();
    for (rel, file) in &source_map.files {
        match (&file.role, &file.doc) {
            (FileRole::IntentDef { stem }, Some(doc)) => {
                let phrases = usersays.get(stem.as_str()).map(Vec::as_slice).unwrap_or(&[]);
                intents.push(parse_intent(rel, doc, phrases, &default_language));
            }
            (FileRole::EntityDef { stem }, Some(doc)) => {
                let files = entries.get(stem.as_str()).map(Vec::as_slice).unwrap_or(&[]);
                entities.push(parse_entity(rel, doc, files));
            }
            _ => {}
        }
    }

    Ok(ChatbotModel {
        name,
        default_language,
        supported_languages,
        intents,
        entities,
        source_map,
    })
}

fn opt_bool(obj: &Value, key: &str) -> Option<bool> {
    obj.get(key).and_then(Value::as_bool)
}

fn str_or_empty(obj: &Value, key: &str) -> String {
    obj.get(key)
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string()
}

fn parse_intent(
    rel: &str,
    doc: &Value,
    usersays: &[(&str, &str, &Value)],
    default_language: &str,
) -> Intent {
    let locator = Locator::file_root(rel);
    let mut intent = Intent {
        name: str_or_empty(doc, "name"),
        priority: doc
            .get("priority")
            .and_then(Value::as_i64)
            .unwrap_or(DEFAULT_PRIORITY),
        is_fallback: opt_bool(doc, "fallbackIntent"),
        input_contexts: Vec::new(),
        output_contexts: Vec::new(),
        parameters: Vec::new(),
        training_phrases: Vec::new(),
        responses: Vec::new(),
        locator: locator.clone(),
    };

    if let Some(contexts) = doc.get("contexts").and_then(Value::as_array) {
        for (i, ctx) in contexts.iter().enumerate() {
            if let Some(name) = ctx.as_str() {
                intent.input_contexts.push(ContextRef {
                    name: name.to_string(),
                    locator: locator.child("contexts").index(i),
                });
            }
        }
    }

    if let Some(responses) = doc.get("responses").and_then(Value::as_array) {
        for (r, resp) in responses.iter().enumerate() {
            let resp_loc = locator.child("responses").index(r);
            if let Some(contexts) = resp.get("affectedContexts").and_then(Value::as_array) {
                for (k, ctx) in contexts.iter().enumerate() {
                    let ctx_loc = resp_loc.child("affectedContexts").index(k);
                    let mut parameters = Vec::new();
                    if let Some(params) = ctx.get("parameters").and_then(Value::as_object) {
                        for (key, value) in params {
                            let rendered = match value {
                                Value::String(s) => s.clone(),
                                other => other.to_string(),
                            };
                            parameters.push((key.clone(), rendered));
                        }
                    }
                    intent.output_contexts.push(OutputContext {
                        name: str_or_empty(ctx, "name"),
                        lifespan: ctx
                            .get("lifespan")
                            .and_then(Value::as_i64)
                            .unwrap_or(DEFAULT_LIFESPAN),
                        parameters,
                        locator: ctx_loc,
                    });
                }
            }
            if let Some(params) = resp.get("parameters").and_then(Value::as_array) {
                for (k, param) in params.iter().enumerate() {
                    let mut prompts = Vec::new();
                    if let Some(items) = param.get("prompts").and_then(Value::as_array) {
                        for item in items {
                            let lang = item
                                .get("lang")
                                .and_then(Value::as_str)
                                .unwrap_or(default_language);
                            prompts.push((lang.to_string(), str_or_empty(item, "value")));
                        }
                    }
                    intent.parameters.push(Parameter {
                        name: str_or_empty(param, "name"),
                        data_type: str_or_empty(param, "dataType"),
                        value_expr: str_or_empty(param, "value"),
                        is_required: opt_bool(param, "required"),
                        is_list: opt_bool(param, "isList"),
                        prompts,
                        locator: resp_loc.child("parameters").index(k),
                    });
                }
            }
            if let Some(messages) = resp.get("messages").and_then(Value::as_array) {
                for (k, msg) in messages.iter().enumerate() {
                    let msg_loc = resp_loc.child("messages").index(k);
                    intent
                        .responses
                        .push(parse_message(msg, msg_loc, default_language));
                }
            }
        }
    }

    for (rel, lang, doc) in usersays {
        if let Some(items) = doc.as_array() {
            for (i, item) in items.iter().enumerate() {
                let phrase_loc = Locator::new(*rel, crate::model::DocumentPath::root()).index(i);
                let mut parts = Vec::new();
                if let Some(data) = item.get("data").and_then(Value::as_array) {
                    for part in data {
                        parts.push(PhrasePart {
                            text: str_or_empty(part, "text"),
                            alias: part
                                .get("alias")
                                .and_then(Value::as_str)
                                .map(str::to_string),
                            entity_ref: part
                                .get("meta")
                                .and_then(Value::as_str)
                                .map(str::to_string),
                        });
                    }
                }
                intent.training_phrases.push(TrainingPhrase {
                    parts,
                    language: (*lang).to_string(),
                    locator: phrase_loc,
                });
            }
        }
    }

    intent
}

fn parse_message(msg: &Value, locator: Locator, default_language: &str) -> Action {
    let language = msg
        .get("lang")
        .and_then(Value::as_str)
        .unwrap_or(default_language)
        .to_string();
    let type_tag = msg.get("type");
    let is_text = matches!(type_tag.and_then(Value::as_str), Some("message"))
        || matches!(type_tag.and_then(Value::as_i64), Some(0));
    let kind = if is_text {
        ActionKind::Text
    } else {
        match (
            type_tag.and_then(Value::as_str),
            type_tag.and_then(Value::as_i64),
        ) {
            (Some("image"), _) | (_, Some(3)) => ActionKind::Image,
            (Some("http_request"), _) => ActionKind::HttpRequest,
            (Some("http_response"), _) => ActionKind::HttpResponse,
            _ => ActionKind::Empty,
        }
    };

    let mut text_variants = Vec::new();
    let mut variant_locators = Vec::new();
    if kind == ActionKind::Text {
        match msg.get("speech") {
            Some(Value::String(s)) => {
                text_variants.push(s.clone());
                variant_locators.push(locator.child("speech"));
            }
            Some(Value::Array(items)) => {
                for (j, item) in items.iter().enumerate() {
                    if let Some(s) = item.as_str() {
                        text_variants.push(s.to_string());
                        variant_locators.push(locator.child("speech").index(j));
                    }
                }
            }
            _ => {}
        }
    }
    // A text-typed message without any usable speech behaves as no action.
    let kind = if kind == ActionKind::Text && text_variants.is_empty() {
        ActionKind::Empty
    } else {
        kind
    };

    Action {
        kind,
        language,
        text_variants,
        locator,
        variant_locators,
    }
}

fn parse_entity(rel: &str, doc: &Value, entry_files: &[(&str, &str, &Value)]) -> EntityDef {
    let kind = if opt_bool(doc, "isRegexp") == Some(true) {
        EntityKind::Regex
    } else if opt_bool(doc, "isEnum") == Some(true) {
        EntityKind::Complex
    } else {
        EntityKind::Simple
    };

    let mut parsed_entries = Vec::new();
    if kind != EntityKind::Regex {
        for (rel, lang, doc) in entry_files {
            if let Some(items) = doc.as_array() {
                for (i, item) in items.iter().enumerate() {
                    let synonyms = item
                        .get("synonyms")
                        .and_then(Value::as_array)
                        .map(|arr| {
                            arr.iter()
                                .filter_map(Value::as_str)
                                .map(str::to_string)
                                .collect()
                        })
                        .unwrap_or_default();
                    parsed_entries.push(EntityEntry {
                        value: str_or_empty(item, "value"),
                        synonyms,
                        language: (*lang).to_string(),
                        locator: Locator::new(*rel, crate::model::DocumentPath::root()).index(i),
                    });
                }
            }
        }
    }

    EntityDef {
        name: str_or_empty(doc, "name"),
        kind,
        entries: parsed_entries,
        locator: Locator::file_root(rel),
    }
}
