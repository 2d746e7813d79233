//! Seeds one mutation in memory and probes whether any conversation can
//! tell the mutant from the original.
//!
//! ```text
//! cargo run -p mutagent --example probe_equivalence -- [operator] [ordinal] [agent-dir]
//! ```

use mutagent::dialogflow::load_agent;
use mutagent::operators::{apply, enumerate_targets, OperatorId};
use mutagent::simulator::{equivalence_probe, ProbeVerdict};

fn main() {
    let mut args = std::env::args().skip(1);
    let operator = args.next().unwrap_or_else(|| "removeChatbotIntent".to_string());
    let ordinal: usize = args.next().map(|s| s.parse().expect("numeric ordinal")).unwrap_or(0);
    let agent_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR"))
    });

    let op = OperatorId::parse(&operator).expect("known operator id");
    let original = load_agent(&agent_dir).expect("agent loads");
    let descriptors = enumerate_targets(&original, op, 42);
    let descriptor = descriptors
        .get(ordinal)
        .unwrap_or_else(|| panic!("{operator} has only {} targets", descriptors.len()));

    println!("mutant: {}", descriptor.mutant_id);
    let (mutant, dirty) = apply(&original, descriptor).expect("mutation applies");
    println!("dirty : {}", dirty.into_iter().collect::<Vec<_>>().join(", "));

    let report = equivalence_probe(&original, &mutant, 3);
    match report.verdict {
        ProbeVerdict::Distinguished { witness } => {
            println!("verdict: DISTINGUISHED ({} states explored)", report.explored_states);
            println!("--- witness ---\n{}", witness.to_text());
        }
        ProbeVerdict::LikelyEquivalent => {
            println!(
                "verdict: LIKELY EQUIVALENT ({} states explored)",
                report.explored_states
            );
        }
    }
}
