//! Drives a conversation through the rule-based simulator, printing bot
//! responses and the evolving context state after each turn.
//!
//! ```text
//! cargo run -p mutagent --example simulate_conversation -- [agent-dir] [utterance]...
//! ```

use mutagent::dialogflow::load_agent;
use mutagent::simulator::{step, ConversationState};

fn main() {
    let mut args = std::env::args().skip(1).peekable();
    let agent_dir = match args.peek() {
        Some(first) if std::path::Path::new(first).join("agent.json").is_file() => {
            args.next().unwrap()
        }
        _ => format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR")),
    };
    let mut utterances: Vec<String> = args.collect();
    if utterances.is_empty() {
        utterances = [
            "hello",
            "book a suite in tokyo",
            "tomorrow",
            "confirm",
            "xyzzy",
        ]
        .map(String::from)
        .to_vec();
    }

    let model = load_agent(&agent_dir).expect("agent loads");
    let mut state = ConversationState::for_model(&model);

    for utterance in utterances {
        println!("> {utterance}");
        let responses = step(&model, &mut state, &utterance);
        if responses.is_empty() {
            println!("  (no response)");
        }
        for text in responses {
            println!("  {text}");
        }
        if !state.active_contexts.is_empty() {
            let contexts: Vec<String> = state
                .active_contexts
                .iter()
                .map(|(name, lifespan)| format!("{name}:{lifespan}"))
                .collect();
            println!("  [contexts {}]", contexts.join(" "));
        }
        if let Some(pending) = &state.pending_slot {
            println!("  [waiting for {} of {}]", pending.parameter, pending.intent);
        }
    }
}
