//! The mutation operator catalog and the machinery that turns an operator
//! plus a target into a mutated model.
//!
//! Operators are data: each [`OperatorSpec`] names the element category it
//! enumerates and the transform it applies. Transforms are deliberately
//! small-grained faults a chatbot developer could plausibly introduce by
//! hand: swapping one property value for another existing one, deleting a
//! property or element, flipping a flag, or corrupting a string.

mod apply;
mod enumerate;
mod rng;

pub use apply::{apply, ApplyError};
pub use enumerate::enumerate_targets;
pub use rng::{RandomPolicy, STRING_ALPHABET, STRING_LENGTH};

use crate::model::Locator;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;

/// Meta-model area an operator belongs to. Mirrors the report grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Chatbot,
    Flow,
    Intent,
    Parameter,
    Input,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Chatbot,
        Category::Flow,
        Category::Intent,
        Category::Parameter,
        Category::Input,
    ];

    /// Column heading used in score tables.
    pub fn heading(self) -> &'static str {
        match self {
            Category::Chatbot => "Chatbot",
            Category::Flow => "Flows",
            Category::Intent => "Intents",
            Category::Parameter => "Parameters",
            Category::Input => "Inputs",
        }
    }
}

/// How an operator changes its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// Delete the element or property.
    Remove,
    /// Replace the value with another value the same property already takes
    /// elsewhere in the agent.
    ReplaceWithExisting,
    /// Replace with a random integer in the inclusive range, distinct from
    /// the original value.
    ReplaceWithRandomInt { lo: i64, hi: i64 },
    /// Replace with a random lowercase string, distinct from the original.
    ReplaceWithRandomString,
    /// Flip a boolean flag.
    Toggle,
}

macro_rules! operator_ids {
    ($( $variant:ident => $name:literal ),+ $(,)?) => {
        /// Identifier of one of the supported mutation operators.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum OperatorId {
            $( $variant, )+
        }

        impl OperatorId {
            pub const ALL: &'static [OperatorId] = &[ $( OperatorId::$variant, )+ ];

            pub fn as_str(self) -> &'static str {
                match self {
                    $( OperatorId::$variant => $name, )+
                }
            }

            pub fn parse(s: &str) -> Option<OperatorId> {
                match s {
                    $( $name => Some(OperatorId::$variant), )+
                    _ => None,
                }
            }
        }
    };
}

operator_ids! {
    ChangeChatbotLanguage => "changeChatbotLanguage",
    RemoveChatbotIntent => "removeChatbotIntent",
    RemoveChatbotEntity => "removeChatbotEntity",
    RemoveChatbotFlow => "removeChatbotFlow",
    ChangeFlowInContextName => "changeFlowInContextName",
    RemoveFlowInContextName => "removeFlowInContextName",
    ChangeFlowOutContextName => "changeFlowOutContextName",
    RemoveFlowOutContextName => "removeFlowOutContextName",
    ChangeFlowOutContextLifespan => "changeFlowOutContextLifespan",
    RemoveFlowOutContextParameter => "removeFlowOutContextParameter",
    ChangeIntentName => "changeIntentName",
    ToggleIntentFallback => "toggleIntentFallback",
    RemoveIntentFallback => "removeIntentFallback",
    ChangeIntentPriority => "changeIntentPriority",
    RemoveIntentParameter => "removeIntentParameter",
    ChangeParameterName => "changeParameterName",
    RemoveParameterName => "removeParameterName",
    ToggleParameterIsRequired => "toggleParameterIsRequired",
    RemoveParameterPrompt => "removeParameterPrompt",
    ChangeSEntityName => "changeSEntityName",
    RemoveSEntityName => "removeSEntityName",
    ChangeSInputValue => "changeSInputValue",
    ChangeSInputSynonym => "changeSInputSynonym",
    ChangeTActionValue => "changeTActionValue",
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for OperatorId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for OperatorId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        OperatorId::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown operator {s:?}")))
    }
}

/// Static description of one operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub id: OperatorId,
    pub category: Category,
    /// Element-index category the operator enumerates.
    pub target_category: &'static str,
    pub transform: Transform,
    pub description: &'static str,
}

/// The full operator catalog, in a fixed order.
pub fn operator_catalog() -> Vec<OperatorSpec> {
    use Category::*;
    use OperatorId::*;
    use Transform::*;
    vec![
        OperatorSpec {
            id: ChangeChatbotLanguage,
            category: Chatbot,
            target_category: "languages",
            transform: ReplaceWithExisting,
            description: "replace the default language with another supported language",
        },
        OperatorSpec {
            id: RemoveChatbotIntent,
            category: Chatbot,
            target_category: "intents",
            transform: Remove,
            description: "remove an intent and its training-phrase files",
        },
        OperatorSpec {
            id: RemoveChatbotEntity,
            category: Chatbot,
            target_category: "entities",
            transform: Remove,
            description: "remove an entity and its entry files",
        },
        OperatorSpec {
            id: RemoveChatbotFlow,
            category: Chatbot,
            target_category: "flows",
            transform: Remove,
            description: "remove an output context that feeds another intent",
        },
        OperatorSpec {
            id: ChangeFlowInContextName,
            category: Flow,
            target_category: "contexts",
            transform: ReplaceWithExisting,
            description: "replace an input context name with another existing one",
        },
        OperatorSpec {
            id: RemoveFlowInContextName,
            category: Flow,
            target_category: "contexts",
            transform: Remove,
            description: "remove an input context name",
        },
        OperatorSpec {
            id: ChangeFlowOutContextName,
            category: Flow,
            target_category: "contexts",
            transform: ReplaceWithExisting,
            description: "replace an output context name with another existing one",
        },
        OperatorSpec {
            id: RemoveFlowOutContextName,
            category: Flow,
            target_category: "contexts",
            transform: Remove,
            description: "remove an output context name",
        },
        OperatorSpec {
            id: ChangeFlowOutContextLifespan,
            category: Flow,
            target_category: "contexts",
            transform: ReplaceWithRandomInt { lo: 1, hi: 3 },
            description: "replace an output context lifespan with 1..=3, distinct from the original",
        },
        OperatorSpec {
            id: RemoveFlowOutContextParameter,
            category: Flow,
            target_category: "contexts",
            transform: Remove,
            description: "remove one output-context parameter",
        },
        OperatorSpec {
            id: ChangeIntentName,
            category: Intent,
            target_category: "intents",
            transform: ReplaceWithExisting,
            description: "replace an intent name with another existing one",
        },
        OperatorSpec {
            id: ToggleIntentFallback,
            category: Intent,
            target_category: "intents",
            transform: Toggle,
            description: "flip an intent's fallback flag",
        },
        OperatorSpec {
            id: RemoveIntentFallback,
            category: Intent,
            target_category: "intents",
            transform: Remove,
            description: "remove an intent's fallback flag",
        },
        OperatorSpec {
            id: ChangeIntentPriority,
            category: Intent,
            target_category: "intents",
            transform: ReplaceWithRandomInt { lo: 0, hi: 1_000_000 },
            description: "replace an intent priority with 0..=1000000, distinct from the original",
        },
        OperatorSpec {
            id: RemoveIntentParameter,
            category: Intent,
            target_category: "parameters",
            transform: Remove,
            description: "remove a parameter from an intent",
        },
        OperatorSpec {
            id: ChangeParameterName,
            category: Parameter,
            target_category: "parameters",
            transform: ReplaceWithExisting,
            description: "replace a parameter name with a sibling parameter's name",
        },
        OperatorSpec {
            id: RemoveParameterName,
            category: Parameter,
            target_category: "parameters",
            transform: Remove,
            description: "remove a parameter name",
        },
        OperatorSpec {
            id: ToggleParameterIsRequired,
            category: Parameter,
            target_category: "parameters",
            transform: Toggle,
            description: "flip a parameter's required flag",
        },
        OperatorSpec {
            id: RemoveParameterPrompt,
            category: Parameter,
            target_category: "parameters",
            transform: Remove,
            description: "remove one parameter prompt",
        },
        OperatorSpec {
            id: ChangeSEntityName,
            category: Input,
            target_category: "entities",
            transform: ReplaceWithExisting,
            description: "replace a simple entity name with another existing one",
        },
        OperatorSpec {
            id: RemoveSEntityName,
            category: Input,
            target_category: "entities",
            transform: Remove,
            description: "remove a simple entity name",
        },
        OperatorSpec {
            id: ChangeSInputValue,
            category: Input,
            target_category: "entity entries",
            transform: ReplaceWithRandomString,
            description: "replace an entry value with a random string",
        },
        OperatorSpec {
            id: ChangeSInputSynonym,
            category: Input,
            target_category: "entity entries",
            transform: ReplaceWithRandomString,
            description: "replace an entry synonym with a random string",
        },
        OperatorSpec {
            id: ChangeTActionValue,
            category: Input,
            target_category: "text actions",
            transform: ReplaceWithRandomString,
            description: "replace a text response variant with a random string",
        },
    ]
}

/// Spec lookup by id.
pub fn operator_spec(id: OperatorId) -> OperatorSpec {
    operator_catalog()
        .into_iter()
        .find(|spec| spec.id == id)
        .expect("catalog covers every id")
}

/// One concrete seeded fault: operator, target location, and the value
/// change. Fully determines the mutant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationDescriptor {
    /// `<operator>__<file-stem>__<ordinal>`; unique within a campaign and
    /// usable as a directory name.
    pub mutant_id: String,
    pub operator: OperatorId,
    pub target: Locator,
    pub original_value: Value,
    /// `None` for removals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutated_value: Option<Value>,
    /// Subseed used for this descriptor's random draw; 0 when the transform
    /// draws nothing.
    pub seed: u64,
}

impl MutationDescriptor {
    pub fn category(&self) -> Category {
        operator_spec(self.operator).category
    }
}
