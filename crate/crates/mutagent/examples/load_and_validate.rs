//! Loads an agent export, prints its shape, and checks every meta-model
//! invariant.
//!
//! ```text
//! cargo run -p mutagent --example load_and_validate -- [agent-dir]
//! ```

use mutagent::dialogflow::load_agent;
use mutagent::model::{element_index, validate};

fn main() {
    let agent_dir = std::env::args().nth(1).unwrap_or_else(|| {
        format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR"))
    });
    let model = load_agent(&agent_dir).expect("agent loads");

    println!("agent     : {}", model.name);
    println!("languages : {}", model.supported_languages.join(", "));
    println!(
        "intents   : {}",
        model
            .intents
            .iter()
            .map(|i| i.name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "entities  : {}",
        model
            .entities
            .iter()
            .map(|e| format!("{} ({:?})", e.name, e.kind))
            .collect::<Vec<_>>()
            .join(", ")
    );
    for flow in model.flows() {
        println!("flow      : {} --{}--> {}", flow.producer, flow.context, flow.consumer);
    }

    let index = element_index(&model);
    println!(
        "indexed   : {} parameters, {} contexts, {} entries, {} text actions",
        index.parameters.len(),
        index.contexts.len(),
        index.entity_entries.len(),
        index.text_actions.len()
    );

    for warning in &model.source_map.warnings {
        println!("warning   : {warning}");
    }
    let violations = validate(&model);
    if violations.is_empty() {
        println!("validate  : ok, no violations");
    } else {
        for violation in &violations {
            println!("violation : {violation}");
        }
    }
}
