use super::*;
use crate::dialogflow::load_agent;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/agents")
        .join(name)
}

#[test]
fn index_counts_match_the_device_shaped_agent() {
    let model = load_agent(fixture("device")).unwrap();
    let index = element_index(&model);
    assert_eq!(index.intents.len(), 11);
    assert_eq!(index.entities.len(), 2);
}

#[test]
fn index_of_empty_agent_is_empty_in_every_category() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("agent.json"), br#"{"language": "en"}"#).unwrap();
    let model = load_agent(dir.path()).unwrap();
    let index = element_index(&model);
    assert!(index.intents.is_empty());
    assert!(index.entities.is_empty());
    assert!(index.flows.is_empty());
    assert!(index.parameters.is_empty());
    assert!(index.contexts.is_empty());
    assert!(index.entity_entries.is_empty());
    assert!(index.text_actions.is_empty());
    // The default language is always addressable.
    assert_eq!(index.languages.len(), 1);
}

#[test]
fn index_is_deterministic() {
    let model = load_agent(fixture("rooms")).unwrap();
    let first = element_index(&model);
    let second = element_index(&model);
    assert_eq!(first.intents, second.intents);
    assert_eq!(first.entities, second.entities);
    assert_eq!(first.flows, second.flows);
    assert_eq!(first.parameters, second.parameters);
    assert_eq!(first.contexts, second.contexts);
    assert_eq!(first.entity_entries, second.entity_entries);
    assert_eq!(first.text_actions, second.text_actions);
    assert_eq!(first.languages, second.languages);
}

#[test]
fn every_indexed_element_resolves_to_one_document_location() {
    for name in ["rooms", "minibook", "scheduler", "device"] {
        let model = load_agent(fixture(name)).unwrap();
        let index = element_index(&model);
        let locators = index.all_locators();
        for locator in &locators {
            crate::dialogflow::resolve(&model, locator)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn duplicate_intent_names_are_reported() {
    let mut model = load_agent(fixture("rooms")).unwrap();
    model.intents[0].name = "Zeta".to_string();
    model.intents[1].name = "Zeta".to_string();
    let violations = validate(&model);
    let duplicates: Vec<_> = violations
        .iter()
        .filter(|v| v.kind == ViolationKind::DuplicateIntentName)
        .collect();
    assert_eq!(duplicates.len(), 1);
}

#[test]
fn default_language_must_be_supported() {
    let mut model = load_agent(fixture("minibook")).unwrap();
    model.default_language = "fr".to_string();
    let violations = validate(&model);
    assert!(violations
        .iter()
        .any(|v| v.kind == ViolationKind::DefaultLanguageNotSupported));
}

#[test]
fn priority_out_of_range_is_reported() {
    let mut model = load_agent(fixture("minibook")).unwrap();
    model.intents[0].priority = MAX_PRIORITY + 1;
    assert!(validate(&model)
        .iter()
        .any(|v| v.kind == ViolationKind::PriorityOutOfRange));
}

#[test]
fn removed_parameter_name_shows_up_as_violation_at_its_path() {
    use crate::operators::{apply, enumerate_targets, OperatorId};
    let model = load_agent(fixture("rooms")).unwrap();
    let descriptors = enumerate_targets(&model, OperatorId::RemoveParameterName, 1);
    let date = descriptors
        .iter()
        .find(|d| d.original_value == serde_json::json!("date"))
        .expect("date parameter enumerated");
    let (mutant, _) = apply(&model, date).unwrap();

    let violations = validate(&mutant);
    let empties: Vec<_> = violations
        .iter()
        .filter(|v| v.kind == ViolationKind::EmptyParameterName)
        .collect();
    assert_eq!(empties.len(), 1);
    assert_eq!(empties[0].locator.file, "intents/BookRoom.json");
    assert_eq!(
        empties[0].locator.path.to_string(),
        "/responses/0/parameters/0"
    );
}

#[test]
fn dangling_alias_is_reported_on_mutants_only() {
    use crate::operators::{apply, enumerate_targets, OperatorId};
    let model = load_agent(fixture("rooms")).unwrap();
    assert!(validate(&model).is_empty());

    // Removing the city parameter leaves its phrase alias dangling.
    let descriptors = enumerate_targets(&model, OperatorId::RemoveIntentParameter, 1);
    let city = descriptors
        .iter()
        .find(|d| d.original_value.get("name") == Some(&serde_json::json!("city")))
        .unwrap();
    let (mutant, _) = apply(&model, city).unwrap();
    assert!(validate(&mutant)
        .iter()
        .any(|v| v.kind == ViolationKind::DanglingAlias));
}

#[test]
fn flow_matching_is_case_insensitive() {
    let mut model = load_agent(fixture("rooms")).unwrap();
    model.intents[0].input_contexts[0].name = "GREETED".to_string();
    let flows = model.flows();
    assert!(flows
        .iter()
        .any(|f| f.producer == "Greet" && f.consumer == "BookRoom"));
}
