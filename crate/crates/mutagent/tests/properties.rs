//! Property tests over the seeded-randomness policy, document paths, the
//! structural diff, and descriptor invariants.

mod common;

use common::fixture_agent;
use mutagent::dialogflow::load_agent;
use mutagent::diff::{diff, DiffEntry};
use mutagent::model::DocumentPath;
use mutagent::operators::{
    enumerate_targets, operator_catalog, RandomPolicy, STRING_LENGTH,
};
use proptest::prelude::*;
use serde_json::Value;

proptest! {
    #[test]
    fn draw_sequences_are_seed_deterministic(seed: u64) {
        let mut a = RandomPolicy::new(seed);
        let mut b = RandomPolicy::new(seed);
        for _ in 0..16 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn int_draws_stay_in_range_and_avoid_the_original(
        seed: u64,
        lo in -1000i64..1000,
        span in 1i64..100,
        original in -1200i64..1200,
    ) {
        let hi = lo + span; // at least two values, so an exclusion always leaves one
        let mut rng = RandomPolicy::new(seed);
        let drawn = rng.int_in_range_excluding(lo, hi, original);
        prop_assert!(drawn >= lo && drawn <= hi);
        prop_assert_ne!(drawn, original);
    }

    #[test]
    fn string_draws_have_policy_shape(seed: u64, original in "[a-z]{0,14}") {
        let mut rng = RandomPolicy::new(seed);
        let drawn = rng.string_excluding(&original);
        prop_assert_eq!(drawn.len(), STRING_LENGTH);
        prop_assert!(drawn.bytes().all(|b| b.is_ascii_lowercase()));
        prop_assert_ne!(drawn, original);
    }

    #[test]
    fn document_paths_render_and_parse_losslessly(
        segments in proptest::collection::vec("[a-zA-Z0-9_/~ .-]{1,12}", 0..6)
    ) {
        let path = DocumentPath::from_segments(segments);
        let rendered = path.to_string();
        prop_assert_eq!(DocumentPath::parse(&rendered), path);
    }
}

/// The 24 operators together must reach every mutable element of the
/// multi-feature sample: each intent, simple entity, entry, synonym,
/// parameter, prompt, context reference, text variant, and language.
#[test]
fn operator_union_covers_every_mutable_element() {
    use mutagent::model::Locator;
    let model = load_agent(fixture_agent("rooms")).unwrap();
    let mut targets: Vec<Locator> = Vec::new();
    for spec in operator_catalog() {
        targets.extend(
            enumerate_targets(&model, spec.id, 1)
                .into_iter()
                .map(|d| d.target),
        );
    }
    let hit = |locator: &Locator| targets.iter().any(|t| t == locator);

    for intent in &model.intents {
        assert!(hit(&intent.locator), "intent {} never targeted", intent.name);
        for ctx in &intent.input_contexts {
            assert!(hit(&ctx.locator), "input context {} never targeted", ctx.name);
        }
        for ctx in &intent.output_contexts {
            assert!(
                hit(&ctx.locator) || hit(&ctx.locator.child("name")),
                "output context {} never targeted",
                ctx.name
            );
        }
        for param in &intent.parameters {
            assert!(hit(&param.locator), "parameter {} never targeted", param.name);
            for j in 0..param.prompts.len() {
                assert!(
                    hit(&param.locator.child("prompts").index(j)),
                    "prompt {j} of {} never targeted",
                    param.name
                );
            }
        }
        for action in &intent.responses {
            for variant in &action.variant_locators {
                assert!(hit(variant), "text variant {variant} never targeted");
            }
        }
    }
    for entity in &model.entities {
        assert!(hit(&entity.locator), "entity {} never targeted", entity.name);
        if entity.kind == mutagent::model::EntityKind::Simple {
            for entry in &entity.entries {
                assert!(
                    hit(&entry.locator.child("value")),
                    "entry {} never targeted",
                    entry.value
                );
                for j in 0..entry.synonyms.len() {
                    assert!(
                        hit(&entry.locator.child("synonyms").index(j)),
                        "synonym {j} of {} never targeted",
                        entry.value
                    );
                }
            }
        }
    }
    // Each supported language is exercised through a language-tagged target.
    for lang in &model.supported_languages {
        let tagged = targets.iter().any(|t| {
            t.file.ends_with(&format!("_entries_{lang}.json"))
                || (t.file == "agent.json" && lang == &model.default_language)
        }) || model.intents.iter().any(|intent| {
            intent.parameters.iter().any(|p| {
                p.prompts.iter().enumerate().any(|(j, (l, _))| {
                    l.eq_ignore_ascii_case(lang) && hit(&p.locator.child("prompts").index(j))
                })
            }) || intent.responses.iter().any(|a| {
                a.language.eq_ignore_ascii_case(lang)
                    && a.variant_locators.iter().any(&hit)
            })
        });
        assert!(tagged, "language {lang} never touched by any operator");
    }
}

/// Removing the Greet intent must be caught by the shortest conversation the
/// alphabet offers. The expected witness is computed here by brute force,
/// independently of the probe's search.
#[test]
fn greet_removal_witness_matches_brute_force_oracle() {
    use mutagent::operators::{apply, OperatorId};
    use mutagent::simulator::{
        equivalence_probe, probe_alphabet, step, ConversationState, ProbeVerdict, Turn,
    };

    let original = load_agent(fixture_agent("rooms")).unwrap();
    let descriptor = enumerate_targets(&original, OperatorId::RemoveChatbotIntent, 42)
        .into_iter()
        .find(|d| d.target.file == "intents/Greet.json")
        .unwrap();
    let (mutant, _) = apply(&original, &descriptor).unwrap();

    // Oracle: try every single alphabet utterance on both agents and collect
    // the ones that already differ after one turn.
    let mut single_turn_distinguishers = Vec::new();
    for utterance in probe_alphabet(&original) {
        let mut a = ConversationState::for_model(&original);
        let mut b = ConversationState::for_model(&mutant);
        if step(&original, &mut a, &utterance) != step(&mutant, &mut b, &utterance) {
            single_turn_distinguishers.push(utterance);
        }
    }
    assert_eq!(single_turn_distinguishers, vec!["hello", "hi there", "hola"]);

    // The breadth-first probe must find the first of them.
    let report = equivalence_probe(&original, &mutant, 3);
    let ProbeVerdict::Distinguished { witness } = report.verdict else {
        panic!("intent removal must be distinguished");
    };
    let me_turns: Vec<&str> = witness
        .turns
        .iter()
        .filter_map(|t| match t {
            Turn::Me(u) => Some(u.as_str()),
            Turn::Bot(_) => None,
        })
        .collect();
    assert_eq!(me_turns, vec!["hello"]);
}

/// Each mutation target sits inside exactly one most-specific indexed
/// element, so finders and reports agree on which element a change belongs to.
#[test]
fn mutation_targets_resolve_to_one_most_specific_element() {
    let model = load_agent(fixture_agent("rooms")).unwrap();
    let index = mutagent::model::element_index(&model);
    let elements = index.all_locators();

    for spec in operator_catalog() {
        for descriptor in enumerate_targets(&model, spec.id, 1) {
            let containing: Vec<_> = elements
                .iter()
                .filter(|e| {
                    e.file == descriptor.target.file && e.path.is_prefix_of(&descriptor.target.path)
                })
                .collect();
            assert!(
                !containing.is_empty(),
                "{}: target {} belongs to no indexed element",
                descriptor.mutant_id,
                descriptor.target
            );
            let deepest = containing
                .iter()
                .map(|e| e.path.segments().len())
                .max()
                .unwrap();
            let most_specific: std::collections::BTreeSet<_> = containing
                .iter()
                .filter(|e| e.path.segments().len() == deepest)
                .map(|e| e.path.to_string())
                .collect();
            assert_eq!(
                most_specific.len(),
                1,
                "{}: ambiguous owning element for {}",
                descriptor.mutant_id,
                descriptor.target
            );
        }
    }
}

/// Every scalar path in a document, for edit-localization checks.
fn scalar_paths(doc: &Value) -> Vec<DocumentPath> {
    fn walk(path: DocumentPath, node: &Value, out: &mut Vec<DocumentPath>) {
        match node {
            Value::Object(map) => {
                for (key, child) in map {
                    walk(path.child(key.clone()), child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(path.index(i), child, out);
                }
            }
            _ => out.push(path),
        }
    }
    let mut out = Vec::new();
    walk(DocumentPath::root(), doc, &mut out);
    out
}

proptest! {
    #[test]
    fn diff_localizes_any_single_scalar_edit(choice: prop::sample::Index, marker in "[a-z]{6}") {
        let model = load_agent(fixture_agent("rooms")).unwrap();
        let doc = model
            .source_map
            .document("intents/BookRoom.json")
            .unwrap()
            .clone();
        let paths = scalar_paths(&doc);
        let path = &paths[choice.index(paths.len())];

        let mut mutated = doc.clone();
        let replacement = Value::String(format!("__edited_{marker}__"));
        path.set(&mut mutated, replacement.clone());
        if path.resolve(&doc) == Some(&replacement) {
            return Ok(()); // coincidence: nothing changed
        }

        let entries = diff(&doc, &mutated);
        prop_assert_eq!(entries.len(), 1);
        prop_assert_eq!(entries[0].path(), path);
        match &entries[0] {
            DiffEntry::Changed { to, .. } => prop_assert_eq!(to, &replacement),
            other => prop_assert!(false, "unexpected entry {:?}", other),
        }
    }

    #[test]
    fn descriptors_always_change_the_value(seed: u64) {
        for agent in ["rooms", "device"] {
            let model = load_agent(fixture_agent(agent)).unwrap();
            for spec in operator_catalog() {
                for descriptor in enumerate_targets(&model, spec.id, seed) {
                    if let Some(mutated) = &descriptor.mutated_value {
                        prop_assert_ne!(
                            mutated, &descriptor.original_value,
                            "{} produced a self-replacement", descriptor.mutant_id
                        );
                    }
                }
            }
        }
    }
}
