//! Generic finder half: enumerates every addressable element of a model,
//! per meta-model category, in deterministic order (file order, then
//! in-document order).

use super::{ChatbotModel, DocumentPath, EntityKind, Locator};
use crate::model::ActionKind;

/// One addressable element: a human-readable label plus its document location.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedElement {
    pub label: String,
    pub locator: Locator,
}

/// Whether a context element gates an intent or is activated by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextDirection {
    Input,
    Output,
}

/// A conversation edge: an output context of one intent consumed as an input
/// context of another.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEdge {
    pub producer: String,
    pub context: String,
    pub consumer: String,
    /// The producer's output-context element.
    pub producer_locator: Locator,
    /// The consumer's input-context reference.
    pub consumer_locator: Locator,
}

/// Every addressable element, grouped by meta-model category.
#[derive(Debug, Clone, Default)]
pub struct ElementIndex {
    pub intents: Vec<IndexedElement>,
    pub entities: Vec<IndexedElement>,
    pub flows: Vec<IndexedElement>,
    pub parameters: Vec<IndexedElement>,
    /// Input-context references and output contexts, tagged by direction.
    pub contexts: Vec<(ContextDirection, IndexedElement)>,
    pub entity_entries: Vec<IndexedElement>,
    pub text_actions: Vec<IndexedElement>,
    pub languages: Vec<IndexedElement>,
}

impl ElementIndex {
    /// Flat view over all categories, for completeness checks.
    pub fn all_locators(&self) -> Vec<&Locator> {
        let ctx = self.contexts.iter().map(|(_, e)| &e.locator);
        self.intents
            .iter()
            .chain(&self.entities)
            .chain(&self.flows)
            .chain(&self.parameters)
            .chain(&self.entity_entries)
            .chain(&self.text_actions)
            .chain(&self.languages)
            .map(|e| &e.locator)
            .chain(ctx)
            .collect()
    }
}

pub(super) fn flows(model: &ChatbotModel) -> Vec<FlowEdge> {
    let mut edges = Vec::new();
    for producer in &model.intents {
        for out_ctx in &producer.output_contexts {
            if out_ctx.name.is_empty() {
                continue;
            }
            for consumer in &model.intents {
                for in_ctx in &consumer.input_contexts {
                    if in_ctx.name.eq_ignore_ascii_case(&out_ctx.name) {
                        edges.push(FlowEdge {
                            producer: producer.name.clone(),
                            context: out_ctx.name.clone(),
                            consumer: consumer.name.clone(),
                            producer_locator: out_ctx.locator.clone(),
                            consumer_locator: in_ctx.locator.clone(),
                        });
                    }
                }
            }
        }
    }
    edges
}

/// Builds the full element index for `model`. Calling this twice on the same
/// model yields identical sequences.
pub fn element_index(model: &ChatbotModel) -> ElementIndex {
    let mut index = ElementIndex::default();

    for intent in &model.intents {
        index.intents.push(IndexedElement {
            label: intent.name.clone(),
            locator: intent.locator.clone(),
        });
        for ctx in &intent.input_contexts {
            index.contexts.push((
                ContextDirection::Input,
                IndexedElement {
                    label: format!("{} < {}", intent.name, ctx.name),
                    locator: ctx.locator.clone(),
                },
            ));
        }
        for ctx in &intent.output_contexts {
            index.contexts.push((
                ContextDirection::Output,
                IndexedElement {
                    label: format!("{} > {}", intent.name, ctx.name),
                    locator: ctx.locator.clone(),
                },
            ));
        }
        for param in &intent.parameters {
            index.parameters.push(IndexedElement {
                label: format!("{}.{}", intent.name, param.name),
                locator: param.locator.clone(),
            });
        }
        for action in &intent.responses {
            if action.kind == ActionKind::Text {
                index.text_actions.push(IndexedElement {
                    label: format!("{} [{}]", intent.name, action.language),
                    locator: action.locator.clone(),
                });
            }
        }
    }

    for entity in &model.entities {
        index.entities.push(IndexedElement {
            label: entity.name.clone(),
            locator: entity.locator.clone(),
        });
        if entity.kind != EntityKind::Regex {
            for entry in &entity.entries {
                index.entity_entries.push(IndexedElement {
                    label: format!("{}:{}", entity.name, entry.value),
                    locator: entry.locator.clone(),
                });
            }
        }
    }

    for edge in flows(model) {
        index.flows.push(IndexedElement {
            label: format!("{} --{}--> {}", edge.producer, edge.context, edge.consumer),
            locator: edge.producer_locator.clone(),
        });
    }

    index.languages.push(IndexedElement {
        label: model.default_language.clone(),
        locator: Locator::new("agent.json", DocumentPath::parse("/language")),
    });
    for (i, lang) in model.supported_languages.iter().enumerate() {
        if lang.eq_ignore_ascii_case(&model.default_language) {
            continue;
        }
        // Additional languages live in agent.json's supportedLanguages array;
        // index 0 there is the first non-default language.
        index.languages.push(IndexedElement {
            label: lang.clone(),
            locator: Locator::new(
                "agent.json",
                DocumentPath::parse("/supportedLanguages").index(i - 1),
            ),
        });
    }

    index
}
