//! Lists every mutation one operator would seed into an agent, without
//! writing anything.
//!
//! ```text
//! cargo run -p mutagent --example enumerate_mutations -- [operator] [agent-dir] [seed]
//! ```

use mutagent::dialogflow::load_agent;
use mutagent::operators::{enumerate_targets, OperatorId};

fn main() {
    let mut args = std::env::args().skip(1);
    let operator = args.next().unwrap_or_else(|| "changeParameterName".to_string());
    let agent_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR"))
    });
    let seed: u64 = args.next().map(|s| s.parse().expect("numeric seed")).unwrap_or(1);

    let Some(op) = OperatorId::parse(&operator) else {
        eprintln!("unknown operator {operator:?}; one of:");
        for id in OperatorId::ALL {
            eprintln!("  {id}");
        }
        std::process::exit(1);
    };

    let model = load_agent(&agent_dir).expect("agent loads");
    let descriptors = enumerate_targets(&model, op, seed);
    println!("{} target(s) for {op} (seed {seed})\n", descriptors.len());
    for d in descriptors {
        let mutated = d
            .mutated_value
            .map(|v| v.to_string())
            .unwrap_or_else(|| "<removed>".to_string());
        println!("{}\n  at   {}\n  from {}\n  to   {}", d.mutant_id, d.target, d.original_value, mutated);
    }
}
