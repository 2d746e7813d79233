//! Runs a mutation campaign and shows what landed on disk.
//!
//! ```text
//! cargo run -p mutagent --example generate_mutants -- [agent-dir] [output-dir] [seed]
//! ```

use mutagent::engine::{run_campaign, MutationConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let agent_dir = args.next().unwrap_or_else(|| {
        format!("{}/fixtures/agents/rooms", env!("CARGO_MANIFEST_DIR"))
    });
    let output_dir = args.next().unwrap_or_else(|| {
        std::env::temp_dir()
            .join(format!("mutagent-demo-{}", std::process::id()))
            .to_string_lossy()
            .into_owned()
    });
    let seed: u64 = args.next().map(|s| s.parse().expect("numeric seed")).unwrap_or(42);

    let mut config = MutationConfig::new(&agent_dir, &output_dir);
    config.seed = seed;
    config.overwrite = true;

    let report = run_campaign(&config).expect("campaign runs");
    println!(
        "wrote {} mutants (seed {seed}, source digest {})",
        report.summary.generated_total,
        &report.source_digest[..12]
    );
    for (operator, count) in &report.summary.per_operator {
        println!("  {count:>3} x {operator}");
    }
    println!("report: {output_dir}/report.json");
}
