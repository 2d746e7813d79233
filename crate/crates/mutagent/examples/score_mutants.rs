//! Full pipeline: generate a campaign, score it against a suite, and print
//! the category matrix.
//!
//! ```text
//! cargo run -p mutagent --example score_mutants -- <agent-dir> <suite-dir> [seed]
//! ```

use mutagent::engine::{run_campaign, score_campaign, MutationConfig, ScoreOptions};
use mutagent::simulator::load_suite;

fn main() {
    let mut args = std::env::args().skip(1);
    let agent_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR"))
    });
    let suite_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/convos/rooms", env!("CARGO_MANIFEST_DIR"))
    });
    let seed: u64 = args.next().map(|s| s.parse().expect("numeric seed")).unwrap_or(42);

    let out = tempfile_dir();
    let mut config = MutationConfig::new(&agent_dir, out.join("mutants"));
    config.seed = seed;

    let report = run_campaign(&config).expect("campaign runs");
    println!(
        "generated {} mutants across {} operators",
        report.summary.generated_total,
        report.summary.per_operator.len()
    );

    let suite = load_suite(&suite_dir).expect("suite loads");
    let table = score_campaign(&report, &out.join("mutants"), &suite, &ScoreOptions::default())
        .expect("scoring runs");

    let width = table
        .categories
        .iter()
        .map(|c| c.cell().len().max(c.category.len()))
        .max()
        .unwrap_or(10)
        + 2;
    print!("{:<20}", "Agent");
    for category in &table.categories {
        print!("{:<width$}", category.category);
    }
    println!();
    print!("{:<20}", table.agent);
    for category in &table.categories {
        print!("{:<width$}", category.cell());
    }
    println!();

    for row in &table.rows {
        if row.likely_equivalent {
            println!("  likely-equivalent: {}", row.mutant_id);
        }
    }

    std::fs::remove_dir_all(&out).ok();
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mutagent-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}
