//! Runs a conversation-script suite against an agent and prints one verdict
//! line per script.
//!
//! ```text
//! cargo run -p mutagent --example run_suite -- <agent-dir> <suite-dir>
//! ```

use mutagent::dialogflow::load_agent;
use mutagent::simulator::{load_suite, run_convo};

fn main() {
    let mut args = std::env::args().skip(1);
    let agent_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR"))
    });
    let suite_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/convos/rooms", env!("CARGO_MANIFEST_DIR"))
    });

    let model = load_agent(&agent_dir).expect("agent loads");
    let scripts = load_suite(&suite_dir).expect("suite loads");

    let mut failed = 0;
    for script in &scripts {
        let outcome = run_convo(&model, script);
        match &outcome.failure {
            None => println!("PASS  {}", outcome.script),
            Some(failure) => {
                failed += 1;
                println!(
                    "FAIL  {}  (turn {}: expected {:?}, got {:?})",
                    outcome.script, failure.turn_index, failure.expected, failure.actual
                );
            }
        }
    }
    println!("{} passed, {failed} failed", scripts.len() - failed);
}
