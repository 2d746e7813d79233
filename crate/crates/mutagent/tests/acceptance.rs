//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]`/`[FAIL]` line (visible with `--nocapture`).
//!
//! ```text
//! cargo test -p mutagent --test acceptance -- --nocapture
//! ```

mod common;

use common::{criterion, fixture_agent, fixture_path, CORPUS};
use mutagent::dialogflow::{load_agent, save_agent, OutputMode};
use mutagent::diff::{diff, DiffEntry};
use mutagent::engine::{reload_mutant, run_campaign, score_campaign, MutationConfig, ScoreOptions};
use mutagent::model::ChatbotModel;
use mutagent::operators::{
    apply, enumerate_targets, operator_catalog, Category, OperatorId, Transform,
};
use mutagent::simulator::{
    load_suite, parse_script, run_convo, step, ConversationState, match_intent,
};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};

#[test]
fn criterion_1_operator_catalog_completeness() {
    criterion(1, "operator catalog lists exactly the 24 operators", || {
        use Category::*;
        use Transform::*;
        let expected: Vec<(&str, Category, Transform)> = vec![
            ("changeChatbotLanguage", Chatbot, ReplaceWithExisting),
            ("removeChatbotIntent", Chatbot, Remove),
            ("removeChatbotEntity", Chatbot, Remove),
            ("removeChatbotFlow", Chatbot, Remove),
            ("changeFlowInContextName", Flow, ReplaceWithExisting),
            ("removeFlowInContextName", Flow, Remove),
            ("changeFlowOutContextName", Flow, ReplaceWithExisting),
            ("removeFlowOutContextName", Flow, Remove),
            (
                "changeFlowOutContextLifespan",
                Flow,
                ReplaceWithRandomInt { lo: 1, hi: 3 },
            ),
            ("removeFlowOutContextParameter", Flow, Remove),
            ("changeIntentName", Intent, ReplaceWithExisting),
            ("toggleIntentFallback", Intent, Toggle),
            ("removeIntentFallback", Intent, Remove),
            (
                "changeIntentPriority",
                Intent,
                ReplaceWithRandomInt { lo: 0, hi: 1_000_000 },
            ),
            ("removeIntentParameter", Intent, Remove),
            ("changeParameterName", Parameter, ReplaceWithExisting),
            ("removeParameterName", Parameter, Remove),
            ("toggleParameterIsRequired", Parameter, Toggle),
            ("removeParameterPrompt", Parameter, Remove),
            ("changeSEntityName", Input, ReplaceWithExisting),
            ("removeSEntityName", Input, Remove),
            ("changeSInputValue", Input, ReplaceWithRandomString),
            ("changeSInputSynonym", Input, ReplaceWithRandomString),
            ("changeTActionValue", Input, ReplaceWithRandomString),
        ];
        let catalog = operator_catalog();
        assert_eq!(catalog.len(), 24);
        assert_eq!(expected.len(), 24);
        for (spec, (name, category, transform)) in catalog.iter().zip(&expected) {
            assert_eq!(spec.id.as_str(), *name);
            assert_eq!(spec.category, *category, "{name}");
            assert_eq!(spec.transform, *transform, "{name}");
        }
    });
}

#[test]
fn criterion_2_enumeration_counts_match_hand_manifest() {
    criterion(2, "per-operator counts equal the hand-counted manifest", || {
        let manifest: BTreeMap<String, Value> = serde_json::from_slice(
            &std::fs::read(fixture_path("golden/rooms_manifest.json")).unwrap(),
        )
        .unwrap();
        let count = |key: &str| -> usize {
            manifest
                .get(key)
                .and_then(Value::as_u64)
                .unwrap_or_else(|| panic!("manifest key {key}")) as usize
        };

        // Closed forms over the manifest numbers.
        let expected: Vec<(OperatorId, usize)> = vec![
            (
                OperatorId::ChangeChatbotLanguage,
                usize::from(count("extra_languages") > 0),
            ),
            (OperatorId::RemoveChatbotIntent, count("intents")),
            (OperatorId::RemoveChatbotEntity, count("entities")),
            (OperatorId::RemoveChatbotFlow, count("consumed_output_contexts")),
            (
                OperatorId::ChangeFlowInContextName,
                count("input_context_refs_with_alternative"),
            ),
            (OperatorId::RemoveFlowInContextName, count("input_context_refs")),
            (
                OperatorId::ChangeFlowOutContextName,
                count("output_contexts_with_name_alternative"),
            ),
            (
                OperatorId::RemoveFlowOutContextName,
                count("output_contexts_with_name_key"),
            ),
            (
                OperatorId::ChangeFlowOutContextLifespan,
                count("output_contexts_with_lifespan_key"),
            ),
            (
                OperatorId::RemoveFlowOutContextParameter,
                count("output_context_parameters"),
            ),
            (OperatorId::ChangeIntentName, count("intents_with_name_sibling")),
            (OperatorId::ToggleIntentFallback, count("intents_with_fallback_key")),
            (OperatorId::RemoveIntentFallback, count("intents_with_fallback_key")),
            (OperatorId::ChangeIntentPriority, count("intents_with_priority_key")),
            (OperatorId::RemoveIntentParameter, count("parameters")),
            (
                OperatorId::ChangeParameterName,
                count("parameters_with_name_sibling"),
            ),
            (OperatorId::RemoveParameterName, count("parameters")),
            (
                OperatorId::ToggleParameterIsRequired,
                count("parameters_with_required_key"),
            ),
            (OperatorId::RemoveParameterPrompt, count("prompt_instances")),
            (
                OperatorId::ChangeSEntityName,
                count("simple_entities_with_name_alternative"),
            ),
            (OperatorId::RemoveSEntityName, count("simple_entities")),
            (OperatorId::ChangeSInputValue, count("simple_entity_entries")),
            (OperatorId::ChangeSInputSynonym, count("simple_entity_synonyms")),
            (OperatorId::ChangeTActionValue, count("text_action_variants")),
        ];

        let model = load_agent(fixture_agent("rooms")).unwrap();
        for (op, expected_count) in expected {
            let descriptors = enumerate_targets(&model, op, 1);
            assert_eq!(
                descriptors.len(),
                expected_count,
                "{} on rooms",
                op.as_str()
            );
        }

        // The element index agrees with the manifest on shared categories.
        let index = mutagent::model::element_index(&model);
        assert_eq!(index.intents.len(), count("intents"));
        assert_eq!(index.entities.len(), count("entities"));
        assert_eq!(index.flows.len(), count("flows"));
        assert_eq!(index.parameters.len(), count("parameters"));
        assert_eq!(index.contexts.len(), count("contexts_indexed"));
        assert_eq!(index.entity_entries.len(), count("simple_entity_entries"));
        assert_eq!(index.languages.len(), count("languages"));
    });
}

/// Structural diff between two models' document trees, per file.
fn assert_exactly_one_change(
    original: &ChatbotModel,
    mutant: &ChatbotModel,
    descriptor: &mutagent::operators::MutationDescriptor,
    dirty: &BTreeSet<String>,
) {
    let id = &descriptor.mutant_id;
    let original_files: BTreeSet<&String> = original.source_map.files.keys().collect();
    let mutant_files: BTreeSet<&String> = mutant.source_map.files.keys().collect();

    if descriptor.mutated_value.is_none() && descriptor.target.path.is_root() {
        // Element removal: the definition file and its companions vanish.
        let mut declared: BTreeSet<String> = original
            .source_map
            .companions_of(&descriptor.target.file)
            .into_iter()
            .collect();
        declared.insert(descriptor.target.file.clone());
        let gone: BTreeSet<String> = original_files
            .difference(&mutant_files)
            .map(|s| (*s).clone())
            .collect();
        assert_eq!(gone, declared, "{id}: removed files");
        assert_eq!(dirty, &declared, "{id}: dirty set");
        for file in &mutant_files {
            let a = &original.source_map.files[*file];
            let b = &mutant.source_map.files[*file];
            match (&a.doc, &b.doc) {
                (Some(da), Some(db)) => assert!(diff(da, db).is_empty(), "{id}: {file} changed"),
                _ => assert_eq!(a.original, b.original, "{id}: {file} changed"),
            }
        }
        return;
    }

    assert_eq!(original_files, mutant_files, "{id}: file set must not change");
    assert_eq!(
        dirty.iter().collect::<Vec<_>>(),
        vec![&descriptor.target.file],
        "{id}: dirty set"
    );
    for file in original_files {
        let a = &original.source_map.files[file];
        let b = &mutant.source_map.files[file];
        let entries = match (&a.doc, &b.doc) {
            (Some(da), Some(db)) => diff(da, db),
            _ => {
                assert_eq!(a.original, b.original, "{id}: opaque {file} changed");
                continue;
            }
        };
        if file == &descriptor.target.file {
            assert_eq!(entries.len(), 1, "{id}: one change in {file}, got {entries:?}");
            assert_eq!(
                entries[0].path(),
                &descriptor.target.path,
                "{id}: change location"
            );
            match (&entries[0], &descriptor.mutated_value) {
                (DiffEntry::Removed { value, .. }, None) => {
                    assert_eq!(value, &descriptor.original_value, "{id}: removed value");
                }
                (DiffEntry::Changed { from, to, .. }, Some(mutated)) => {
                    assert_eq!(from, &descriptor.original_value, "{id}: original value");
                    assert_eq!(to, mutated, "{id}: mutated value");
                }
                (entry, _) => panic!("{id}: unexpected diff entry {entry:?}"),
            }
        } else {
            assert!(entries.is_empty(), "{id}: unexpected change in {file}");
        }
    }
}

#[test]
fn criterion_3_exactly_one_change_across_corpus() {
    criterion(3, "every mutant differs exactly at its declared locations", || {
        let started = std::time::Instant::now();
        let mut total = 0usize;
        for agent in CORPUS {
            let model = load_agent(fixture_agent(agent)).unwrap();
            for spec in operator_catalog() {
                for descriptor in enumerate_targets(&model, spec.id, 7) {
                    let (mutant, dirty) = apply(&model, &descriptor).unwrap();
                    assert_exactly_one_change(&model, &mutant, &descriptor, &dirty);
                    total += 1;
                }
            }
        }
        assert!(total > 150, "corpus produced only {total} mutants");
        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs() < 60,
            "property suite took {elapsed:?}, budget is one minute"
        );
    });
}

#[test]
fn criterion_4_round_trip_fidelity() {
    criterion(4, "load/save/load round-trips every corpus agent", || {
        for agent in CORPUS {
            let model = load_agent(fixture_agent(agent)).unwrap();
            let out = tempfile::tempdir().unwrap();
            save_agent(&model, out.path(), OutputMode::Full, &BTreeSet::new(), true).unwrap();
            for (rel, file) in &model.source_map.files {
                let written = std::fs::read(out.path().join(rel)).unwrap();
                assert_eq!(written, file.original, "{agent}/{rel} not byte-identical");
            }
            let reloaded = load_agent(out.path()).unwrap();
            assert!(
                model.structurally_equal(&reloaded),
                "{agent}: reload differs"
            );
        }
    });
}

#[test]
fn criterion_5_value_range_conformance() {
    criterion(5, "1000+ seeded draws stay in range and differ from originals", || {
        let rooms = load_agent(fixture_agent("rooms")).unwrap();
        let device = load_agent(fixture_agent("device")).unwrap();
        let mut lifespan_draws = 0usize;
        let mut priority_draws = 0usize;
        for seed in 0..300u64 {
            for model in [&rooms, &device] {
                for d in enumerate_targets(model, OperatorId::ChangeFlowOutContextLifespan, seed) {
                    let original = d.original_value.as_i64().unwrap();
                    let drawn = d.mutated_value.as_ref().unwrap().as_i64().unwrap();
                    assert!((1..=3).contains(&drawn), "lifespan {drawn} out of range");
                    assert_ne!(drawn, original, "lifespan draw equals original");
                    lifespan_draws += 1;
                }
                for d in enumerate_targets(model, OperatorId::ChangeIntentPriority, seed) {
                    let original = d.original_value.as_i64().unwrap();
                    let drawn = d.mutated_value.as_ref().unwrap().as_i64().unwrap();
                    assert!((0..=1_000_000).contains(&drawn), "priority {drawn} out of range");
                    assert_ne!(drawn, original, "priority draw equals original");
                    priority_draws += 1;
                }
            }
        }
        assert!(lifespan_draws >= 1000, "only {lifespan_draws} lifespan draws");
        assert!(priority_draws >= 1000, "only {priority_draws} priority draws");
    });
}

#[test]
fn criterion_6_campaign_determinism() {
    criterion(6, "identical seed reproduces byte-identical report and digests", || {
        let run = |out: &std::path::Path| {
            let mut config = MutationConfig::new(fixture_agent("rooms"), out);
            config.seed = 42;
            run_campaign(&config).unwrap();
            std::fs::read(out.join("report.json")).unwrap()
        };
        let first_dir = tempfile::tempdir().unwrap();
        let second_dir = tempfile::tempdir().unwrap();
        let first = run(&first_dir.path().join("m"));
        let second = run(&second_dir.path().join("m"));
        assert_eq!(first, second, "report.json must be byte-identical");

        // Mutant digests recorded in the reports are identical too (checked
        // via report equality) and match what actually landed on disk.
        let report = mutagent::engine::MutationReport::from_json(&first).unwrap();
        for record in &report.mutants {
            for written in &record.files_written {
                let on_disk = std::fs::read(
                    first_dir
                        .path()
                        .join("m")
                        .join(&record.output_dir)
                        .join(&written.path),
                )
                .unwrap();
                assert_eq!(
                    mutagent::dialogflow::sha256_hex(&on_disk),
                    written.sha256,
                    "digest mismatch for {}/{}",
                    record.output_dir,
                    written.path
                );
            }
        }
    });
}

/// Static competition oracle: two live intents compete when some instantiated
/// phrase surface is shared and their context gates can be satisfied at the
/// same time (here: equal lowercase input-context sets).
fn competing_intents(model: &ChatbotModel) -> BTreeSet<String> {
    let mut surfaces: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for intent in &model.intents {
        if intent.is_fallback == Some(true) {
            continue;
        }
        let mut set = BTreeSet::new();
        for phrase in &intent.training_phrases {
            let mut prefixes = vec![String::new()];
            for part in &phrase.parts {
                let options: Vec<String> = match &part.entity_ref {
                    Some(entity_ref) => {
                        match model
                            .entity(entity_ref.trim_start_matches('@'))
                            .filter(|e| !e.entries.is_empty())
                        {
                            Some(entity) => entity.entries.iter().map(|e| e.value.clone()).collect(),
                            None => vec![part.text.clone()],
                        }
                    }
                    None => vec![part.text.clone()],
                };
                prefixes = prefixes
                    .iter()
                    .flat_map(|p| options.iter().map(move |o| format!("{p}{o}")))
                    .collect();
            }
            for surface in prefixes {
                let normalized = surface.trim().to_lowercase().split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ");
                set.insert(normalized);
            }
        }
        surfaces.insert(intent.name.clone(), set);
    }

    let gate = |name: &str| -> BTreeSet<String> {
        model
            .intent(name)
            .map(|i| {
                i.input_contexts
                    .iter()
                    .map(|c| c.name.to_lowercase())
                    .collect()
            })
            .unwrap_or_default()
    };

    let mut competing = BTreeSet::new();
    let names: Vec<&String> = surfaces.keys().collect();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            if gate(a) == gate(b) && !surfaces[*a].is_disjoint(&surfaces[*b]) {
                competing.insert((*a).clone());
                competing.insert((*b).clone());
            }
        }
    }
    competing
}

#[test]
fn criterion_7_golden_score_matrix() {
    criterion(7, "score matrix reproduces the audited golden exactly", || {
        let started = std::time::Instant::now();
        let out = tempfile::tempdir().unwrap();
        let mutants_dir = out.path().join("mutants");
        let mut config = MutationConfig::new(fixture_agent("rooms"), &mutants_dir);
        config.seed = 42;
        let report = run_campaign(&config).unwrap();

        let suite = load_suite(fixture_path("convos/rooms")).unwrap();
        assert_eq!(suite.len(), 6);
        let table = score_campaign(&report, &mutants_dir, &suite, &ScoreOptions::default()).unwrap();

        let golden: Value = serde_json::from_slice(
            &std::fs::read(fixture_path("golden/rooms_score.json")).unwrap(),
        )
        .unwrap();
        let actual: Value = serde_json::from_slice(&table.to_json()).unwrap();
        assert_eq!(actual, golden, "score table drifted from the audited golden");

        // Qualitative ordering (a): parameter mutations are caught no more
        // often than chatbot-structure mutations.
        let chatbot = table.category("Chatbot").unwrap().percent_killed.unwrap();
        let parameters = table.category("Parameters").unwrap().percent_killed.unwrap();
        assert!(
            parameters <= chatbot,
            "Parameters {parameters}% must not exceed Chatbot {chatbot}%"
        );

        // Qualitative ordering (b): priority changes on intents that never
        // compete for an utterance are flagged likely-equivalent.
        let model = load_agent(fixture_agent("rooms")).unwrap();
        let competing = competing_intents(&model);
        assert!(competing.contains("Help") && competing.contains("Hours"));
        for descriptor in enumerate_targets(&model, OperatorId::ChangeIntentPriority, 42) {
            let intent = model
                .intents
                .iter()
                .find(|i| i.locator.file == descriptor.target.file)
                .unwrap();
            if competing.contains(&intent.name) {
                continue;
            }
            let row = table
                .rows
                .iter()
                .find(|r| r.mutant_id == descriptor.mutant_id)
                .unwrap();
            assert!(
                row.likely_equivalent,
                "{} targets non-competing {} and must be likely-equivalent",
                row.mutant_id, intent.name
            );
        }

        let elapsed = started.elapsed();
        assert!(
            elapsed.as_secs() < 120,
            "full score run took {elapsed:?}, budget is two minutes"
        );
    });
}

#[test]
fn criterion_8_witness_soundness() {
    criterion(8, "every distinguishing witness passes original, fails mutant", || {
        let out = tempfile::tempdir().unwrap();
        let mutants_dir = out.path().join("mutants");
        let mut config = MutationConfig::new(fixture_agent("rooms"), &mutants_dir);
        config.seed = 42;
        let report = run_campaign(&config).unwrap();
        let suite = load_suite(fixture_path("convos/rooms")).unwrap();
        let table = score_campaign(&report, &mutants_dir, &suite, &ScoreOptions::default()).unwrap();

        let original = load_agent(fixture_agent("rooms")).unwrap();
        let mut replayed = 0usize;
        for row in &table.rows {
            let Some(witness_text) = &row.witness else {
                continue;
            };
            let witness = parse_script(witness_text).unwrap();
            let mutant = reload_mutant(&report, &mutants_dir, &row.mutant_id, &ScoreOptions::default())
                .unwrap();
            assert!(
                run_convo(&original, &witness).passed(),
                "{}: witness must pass on the original",
                row.mutant_id
            );
            assert!(
                !run_convo(&mutant, &witness).passed(),
                "{}: witness must fail on the mutant",
                row.mutant_id
            );
            replayed += 1;
        }
        assert!(replayed >= 5, "only {replayed} witnesses found; corpus should produce more");
    });
}

#[test]
fn criterion_9_simulator_unit_semantics() {
    criterion(9, "lifespan, tie-break, fallback and slot-filling behave as specified", || {
        let model = load_agent(fixture_agent("rooms")).unwrap();

        // Context lifespan eviction: greeted enters at 5 and survives exactly
        // five further turns without reactivation.
        let mut state = ConversationState::for_model(&model);
        step(&model, &mut state, "hello");
        assert_eq!(state.active_contexts.get("greeted"), Some(&5));
        for _ in 0..4 {
            step(&model, &mut state, "unmatched chatter");
            assert!(state.active_contexts.contains_key("greeted"));
        }
        step(&model, &mut state, "unmatched chatter");
        assert!(!state.active_contexts.contains_key("greeted"));

        // Priority: "help" matches both Help (900000) and Hours (500000).
        let state = ConversationState::for_model(&model);
        let result = match_intent(&model, &state, "help");
        assert_eq!(result.matched_intent.as_deref(), Some("Help"));
        assert!(!result.used_fallback);

        // Fallback activates when nothing matches.
        let result = match_intent(&model, &state, "xyzzy gibberish");
        assert_eq!(result.matched_intent.as_deref(), Some("Fallback"));
        assert!(result.used_fallback);
        assert_eq!(result.response_texts, vec!["Sorry, I did not get that"]);

        // Slot filling: an utterance without the required date prompts for it,
        // collected values substitute into the response.
        let mut state = ConversationState::for_model(&model);
        step(&model, &mut state, "hello");
        let texts = step(&model, &mut state, "book a suite in tokyo");
        assert_eq!(texts, vec!["When?"]);
        let pending = state.pending_slot.clone().unwrap();
        assert_eq!((pending.intent.as_str(), pending.parameter.as_str()), ("BookRoom", "date"));
        let texts = step(&model, &mut state, "tomorrow");
        assert_eq!(texts, vec!["Booked a Suite in Tokyo on tomorrow"]);
        assert_eq!(state.active_contexts.get("booking"), Some(&2));
    });
}
