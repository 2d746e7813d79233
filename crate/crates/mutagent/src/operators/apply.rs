//! Actuates a mutation descriptor against a model, copy-on-write.
//!
//! The change happens on the document trees, never on the typed view: the
//! mutated documents are re-parsed into a fresh model through the same code
//! path a reload would take, so the mutant model always agrees with what the
//! mutant on disk will say.

use super::MutationDescriptor;
use crate::dialogflow::build_model;
use crate::model::{ChatbotModel, Locator};

use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApplyError {
    #[error("descriptor target no longer resolves: {0}")]
    StaleDescriptor(Locator),
    #[error("drawn value equals the original at {0}; the random policy must prevent this")]
    SelfReplacement(Locator),
    #[error("mutated documents no longer form a loadable agent: {0}")]
    Rebuild(#[from] crate::dialogflow::LoadError),
}

/// Applies `descriptor` to `model`, returning the mutated model plus the set
/// of files that changed (including companion files deleted together with a
/// removed intent or entity). The input model is untouched.
pub fn apply(
    model: &ChatbotModel,
    descriptor: &MutationDescriptor,
) -> Result<(ChatbotModel, BTreeSet<String>), ApplyError> {
    let mut source_map = model.source_map.clone();
    let mut dirty = BTreeSet::new();
    let target = &descriptor.target;

    if descriptor.mutated_value.is_none() && target.path.is_root() {
        // Whole-element removal: drop the definition file and its companions.
        if !source_map.files.contains_key(&target.file) {
            return Err(ApplyError::StaleDescriptor(target.clone()));
        }
        for companion in source_map.companions_of(&target.file) {
            source_map.files.remove(&companion);
            dirty.insert(companion);
        }
        source_map.files.remove(&target.file);
        dirty.insert(target.file.clone());
    } else {
        let doc = source_map
            .files
            .get_mut(&target.file)
            .and_then(|f| f.doc.as_mut())
            .ok_or_else(|| ApplyError::StaleDescriptor(target.clone()))?;
        let current = target
            .path
            .resolve(doc)
            .ok_or_else(|| ApplyError::StaleDescriptor(target.clone()))?;
        if *current != descriptor.original_value {
            return Err(ApplyError::StaleDescriptor(target.clone()));
        }
        match &descriptor.mutated_value {
            None => {
                target.path.remove(doc);
            }
            Some(mutated) => {
                if mutated == current {
                    return Err(ApplyError::SelfReplacement(target.clone()));
                }
                target.path.set(doc, mutated.clone());
            }
        }
        dirty.insert(target.file.clone());
    }

    let mutated_model = build_model(source_map)?;
    debug_assert!(verify(&mutated_model, descriptor));
    Ok((mutated_model, dirty))
}

/// Re-resolving the target in the mutant yields the mutated value, or nothing
/// for removals.
fn verify(mutant: &ChatbotModel, descriptor: &MutationDescriptor) -> bool {
    let resolved = crate::dialogflow::resolve(mutant, &descriptor.target).ok();
    match &descriptor.mutated_value {
        Some(expected) => {
            resolved.map(|handle| handle.value) == Some(expected.clone())
        }
        None => {
            if descriptor.target.path.is_root() {
                resolved.is_none()
            } else {
                // Removing an array element shifts its siblings, so the path
                // may still resolve; it must no longer hold the original.
                resolved.map(|h| h.value) != Some(descriptor.original_value.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{enumerate_targets, OperatorId};

    fn sample() -> ChatbotModel {
        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/agents/rooms");
        crate::dialogflow::load_agent(root).expect("fixture loads")
    }

    #[test]
    fn toggle_fallback_flips_one_file() {
        let model = sample();
        let descriptors = enumerate_targets(&model, OperatorId::ToggleIntentFallback, 1);
        let fallback = descriptors
            .iter()
            .find(|d| d.target.file == "intents/Fallback.json")
            .expect("fallback intent enumerated");
        assert_eq!(fallback.original_value, serde_json::json!(true));
        assert_eq!(fallback.mutated_value, Some(serde_json::json!(false)));

        let (mutant, dirty) = apply(&model, fallback).unwrap();
        assert_eq!(
            dirty.iter().collect::<Vec<_>>(),
            vec!["intents/Fallback.json"]
        );
        assert_eq!(mutant.intent("Fallback").unwrap().is_fallback, Some(false));
        // Source model untouched.
        assert_eq!(model.intent("Fallback").unwrap().is_fallback, Some(true));
    }

    #[test]
    fn intent_removal_takes_companions_along() {
        let model = sample();
        let descriptors = enumerate_targets(&model, OperatorId::RemoveChatbotIntent, 1);
        let greet = descriptors
            .iter()
            .find(|d| d.target.file == "intents/Greet.json")
            .unwrap();
        let (mutant, dirty) = apply(&model, greet).unwrap();
        let dirty: Vec<_> = dirty.into_iter().collect();
        assert_eq!(
            dirty,
            vec![
                "intents/Greet.json",
                "intents/Greet_usersays_en.json",
                "intents/Greet_usersays_es.json",
            ]
        );
        assert!(mutant.intent("Greet").is_none());
        assert_eq!(mutant.intents.len(), model.intents.len() - 1);
    }

    #[test]
    fn stale_descriptor_is_rejected() {
        let model = sample();
        let descriptors = enumerate_targets(&model, OperatorId::RemoveIntentParameter, 1);
        let first = &descriptors[0];
        let (mutant, _) = apply(&model, first).unwrap();
        // Applying the same removal to the already-mutated model must fail:
        // the target no longer holds the original value.
        let err = apply(&mutant, first).unwrap_err();
        assert!(matches!(err, ApplyError::StaleDescriptor(_)));
    }
}
