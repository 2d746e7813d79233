//! Command-line front end.
//!
//! Thin argument-parsing shell over the library: campaign generation
//! (`generate`), suite execution (`test`), kill-rate scoring (`score`),
//! equivalence probing (`probe`) and model validation (`validate`).
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 source agent
//! failed to load, 3 suite fails on the original agent (score), 4 internal
//! error. Diagnostics go to stderr; machine output (plain text, or JSON with
//! `--json`) goes to stdout.

use clap::{ArgAction, Args, Parser, Subcommand};
use mutagent::dialogflow::{load_agent, LoadError, OutputMode};
use mutagent::engine::{
    run_campaign, score_campaign, CampaignError, MutationConfig, MutationReport,
    OperatorSelection, ScoreError, ScoreOptions, REPORT_FILE,
};
use mutagent::model::{element_index, validate};
use mutagent::simulator::{equivalence_probe, load_suite, run_suite, ProbeVerdict};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_SOURCE: u8 = 2;
const EXIT_SUITE_BASELINE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "mutagent", version, about = "Mutation testing for chatbot agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for scoring.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Generate mutants and the seeded-mutation report.
    Generate(GenerateArgs),
    /// Run a conversation suite against one agent.
    Test(TestArgs),
    /// Score a generated campaign against a suite.
    Score(ScoreArgs),
    /// Probe one mutant for behavioral equivalence with its source.
    Probe(ProbeArgs),
    /// Check an agent against the meta-model invariants.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Agent export directory.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Output directory for mutants and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// full = complete agent copies, modified = changed files only.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<OutputMode>,
    /// Comma-separated operator ids, or "all".
    #[arg(long)]
    operators: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    overwrite: bool,
    /// Cap mutants per operator.
    #[arg(long)]
    max_mutants: Option<usize>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    source: PathBuf,
    /// Directory of *.convo.txt scripts.
    #[arg(long)]
    suite: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Campaign directory containing report.json and the mutants.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    suite: PathBuf,
    /// Override the source root recorded in the report.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Equivalence-probe depth in user turns.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=4))]
    depth: u8,
}

#[derive(Args)]
struct ProbeArgs {
    /// Original agent directory.
    #[arg(long)]
    source: PathBuf,
    /// Mutant agent directory (full copy).
    #[arg(long)]
    mutant: Option<PathBuf>,
    /// Campaign directory, used with --id to locate the mutant.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mutant id within the campaign named by --out.
    #[arg(long)]
    id: Option<String>,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=4))]
    depth: u8,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    source: PathBuf,
}

fn parse_mode(s: &str) -> Result<OutputMode, String> {
    match s {
        "full" => Ok(OutputMode::Full),
        "modified" | "modified_only" => Ok(OutputMode::ModifiedOnly),
        other => Err(format!("unknown mode {other:?} (expected full|modified)")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                EXIT_OK
            } else {
                eprint!("{err}");
                EXIT_USAGE
            };
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}

fn run(cli: Cli) -> u8 {
    match &cli.command {
        Command::Generate(args) => generate(&cli, args),
        Command::Test(args) => test(&cli, args),
        Command::Score(args) => score(&cli, args),
        Command::Probe(args) => probe(&cli, args),
        Command::Validate(args) => validate_cmd(&cli, args),
    }
}

fn usage_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn load_error(err: LoadError) -> u8 {
    eprintln!("error: {err}");
    EXIT_SOURCE
}

fn generate(cli: &Cli, args: &GenerateArgs) -> u8 {
    let mut config = match &args.config {
        Some(path) => {
            let bytes = match std::fs::read(path) {
                Ok(bytes) => bytes,
                Err(err) => return usage_error(format!("cannot read {}: {err}", path.display())),
            };
            match serde_json::from_slice::<MutationConfig>(&bytes) {
                Ok(config) => config,
                Err(err) => {
                    return usage_error(format!("invalid config {}: {err}", path.display()))
                }
            }
        }
        None => {
            let (Some(source), Some(out)) = (&args.source, &args.out) else {
                return usage_error("generate needs --config, or --source and --out");
            };
            MutationConfig::new(source, out)
        }
    };

    if let Some(source) = &args.source {
        config.source_root = source.clone();
    }
    if let Some(out) = &args.out {
        config.output_root = out.clone();
    }
    if let Some(mode) = args.mode {
        config.output_mode = mode;
    }
    if let Some(operators) = &args.operators {
        config.operators = parse_operator_list(operators);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.overwrite {
        config.overwrite = true;
    }
    if let Some(cap) = args.max_mutants {
        config.max_mutants = Some(cap);
    }

    // Reject unknown operator names before touching the filesystem.
    if let Err(err) = config.operators.resolve() {
        return usage_error(err);
    }

    match run_campaign(&config) {
        Ok(report) => {
            if cli.json {
                print_bytes(&report.to_json());
            } else {
                println!(
                    "{} mutants written under {} (report: {})",
                    report.summary.generated_total,
                    config.output_root.display(),
                    config.output_root.join(REPORT_FILE).display()
                );
            }
            EXIT_OK
        }
        Err(CampaignError::ConfigInvalid(message)) => usage_error(message),
        Err(CampaignError::SourceLoadFailed(err)) => load_error(err),
        Err(err @ CampaignError::OutputUnwritable { .. }) => usage_error(err),
        Err(err) => internal_error(err),
    }
}

fn parse_operator_list(raw: &str) -> OperatorSelection {
    if raw.trim().eq_ignore_ascii_case("all") {
        OperatorSelection::all()
    } else {
        OperatorSelection::ids(
            raw.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string),
        )
    }
}

fn test(cli: &Cli, args: &TestArgs) -> u8 {
    let model = match load_agent(&args.source) {
        Ok(model) => model,
        Err(err) => return load_error(err),
    };
    let suite = match load_suite(&args.suite) {
        Ok(suite) => suite,
        Err(err) => return usage_error(err),
    };
    let outcomes = run_suite(&model, &suite);
    if cli.json {
        let rows: Vec<serde_json::Value> = outcomes
            .iter()
            .map(|o| {
                serde_json::json!({
                    "script": o.script,
                    "verdict": if o.passed() { "pass" } else { "fail" },
                    "failure": o.failure.as_ref().map(|f| serde_json::json!({
                        "turn_index": f.turn_index,
                        "expected": f.expected,
                        "actual": f.actual,
                    })),
                })
            })
            .collect();
        print_json(&serde_json::Value::Array(rows));
    } else {
        for outcome in &outcomes {
            match &outcome.failure {
                None => println!("PASS  {}", outcome.script),
                Some(failure) => println!(
                    "FAIL  {}  (turn {}: expected {:?}, got {:?})",
                    outcome.script, failure.turn_index, failure.expected, failure.actual
                ),
            }
        }
        let failed = outcomes.iter().filter(|o| !o.passed()).count();
        println!("{} passed, {failed} failed", outcomes.len() - failed);
    }
    EXIT_OK
}

fn score(cli: &Cli, args: &ScoreArgs) -> u8 {
    let report_path = args.out.join(REPORT_FILE);
    let bytes = match std::fs::read(&report_path) {
        Ok(bytes) => bytes,
        Err(err) => return usage_error(format!("cannot read {}: {err}", report_path.display())),
    };
    let report = match MutationReport::from_json(&bytes) {
        Ok(report) => report,
        Err(err) => return usage_error(format!("invalid report {}: {err}", report_path.display())),
    };
    let suite = match load_suite(&args.suite) {
        Ok(suite) => suite,
        Err(err) => return usage_error(err),
    };
    let options = ScoreOptions {
        probe_depth: args.depth as usize,
        jobs: cli.jobs.unwrap_or_else(|| ScoreOptions::default().jobs),
        source_root: args.source.clone(),
    };
    match score_campaign(&report, &args.out, &suite, &options) {
        Ok(table) => {
            if cli.verbose > 0 {
                for row in &table.rows {
                    eprintln!(
                        "{:?}{} {}",
                        row.verdict,
                        if row.likely_equivalent { " (likely equivalent)" } else { "" },
                        row.mutant_id
                    );
                }
            }
            if cli.json {
                print_bytes(&table.to_json());
            } else {
                print_score_table(&table);
            }
            EXIT_OK
        }
        Err(ScoreError::SuiteFailsOnOriginal(failures)) => {
            eprintln!("error: suite fails on the original agent:");
            for (script, detail) in failures {
                eprintln!("  {script}: {detail}");
            }
            EXIT_SUITE_BASELINE
        }
        Err(ScoreError::SourceLoadFailed(err)) => load_error(err),
        Err(err @ ScoreError::EmptySuite) => usage_error(err),
    }
}

fn print_score_table(table: &mutagent::engine::ScoreTable) {
    let width = table
        .categories
        .iter()
        .map(|c| c.cell().len().max(c.category.len()) + 2)
        .max()
        .unwrap_or(12);
    let agent_width = table.agent.len().max("Agent".len()) + 2;
    print!("{:<agent_width$}", "Agent");
    for category in &table.categories {
        print!("{:<width$}", category.category);
    }
    println!();
    print!("{:<agent_width$}", table.agent);
    for category in &table.categories {
        print!("{:<width$}", category.cell());
    }
    println!();
}

fn probe(cli: &Cli, args: &ProbeArgs) -> u8 {
    let original = match load_agent(&args.source) {
        Ok(model) => model,
        Err(err) => return load_error(err),
    };

    let mutant = match (&args.mutant, &args.out, &args.id) {
        (Some(dir), _, _) => match load_agent(dir) {
            Ok(model) => model,
            Err(err) => return load_error(err),
        },
        (None, Some(out), Some(id)) => {
            match load_campaign_mutant(&args.source, out, id) {
                Ok(model) => model,
                Err(code) => return code,
            }
        }
        _ => return usage_error("probe needs --mutant, or --out together with --id"),
    };

    let report = equivalence_probe(&original, &mutant, args.depth as usize);
    if cli.json {
        let witness = match &report.verdict {
            ProbeVerdict::Distinguished { witness } => Some(witness.to_text()),
            ProbeVerdict::LikelyEquivalent => None,
        };
        print_json(&serde_json::json!({
            "verdict": match &report.verdict {
                ProbeVerdict::Distinguished { .. } => "distinguished",
                ProbeVerdict::LikelyEquivalent => "likely_equivalent",
            },
            "alphabet_truncated": report.alphabet_truncated,
            "explored_states": report.explored_states,
            "witness": witness,
        }));
    } else {
        match &report.verdict {
            ProbeVerdict::Distinguished { witness } => {
                println!("DISTINGUISHED after exploring {} states", report.explored_states);
                println!("--- witness script ---");
                print!("{}", witness.to_text());
            }
            ProbeVerdict::LikelyEquivalent => {
                println!(
                    "LIKELY EQUIVALENT (no distinguishing conversation within depth {}, {} states explored)",
                    args.depth, report.explored_states
                );
            }
        }
        if report.alphabet_truncated {
            println!("note: probe alphabet truncated to the cap");
        }
    }
    EXIT_OK
}

/// Reconstructs one campaign mutant through the report row (full copies load
/// directly; modified-only mutants overlay the source, honoring deletions).
fn load_campaign_mutant(source: &Path, out: &Path, id: &str) -> Result<mutagent::model::ChatbotModel, u8> {
    let report_path = out.join(REPORT_FILE);
    let bytes = std::fs::read(&report_path)
        .map_err(|err| usage_error(format!("cannot read {}: {err}", report_path.display())))?;
    let report = MutationReport::from_json(&bytes)
        .map_err(|err| usage_error(format!("invalid report: {err}")))?;
    let Some(_record) = report.mutants.iter().find(|m| m.descriptor.mutant_id == id) else {
        return Err(usage_error(format!("mutant {id:?} not found in {}", report_path.display())));
    };
    let options = ScoreOptions {
        source_root: Some(source.to_path_buf()),
        ..ScoreOptions::default()
    };
    mutagent::engine::reload_mutant(&report, out, id, &options)
        .map_err(usage_error)
}

fn validate_cmd(cli: &Cli, args: &ValidateArgs) -> u8 {
    let model = match load_agent(&args.source) {
        Ok(model) => model,
        Err(err) => return load_error(err),
    };
    let violations = validate(&model);
    let index = element_index(&model);
    if cli.json {
        print_json(&serde_json::json!({
            "agent": model.name,
            "intents": index.intents.len(),
            "entities": index.entities.len(),
            "flows": index.flows.len(),
            "languages": model.supported_languages,
            "warnings": model.source_map.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "violations": violations.iter().map(|v| serde_json::json!({
                "kind": v.kind.to_string(),
                "file": v.locator.file,
                "path": v.locator.path.to_string(),
                "message": v.message,
            })).collect::<Vec<_>>(),
        }));
    } else {
        println!(
            "{}: {} intents, {} entities, {} flows, languages [{}]",
            model.name,
            index.intents.len(),
            index.entities.len(),
            index.flows.len(),
            model.supported_languages.join(", ")
        );
        for warning in &model.source_map.warnings {
            println!("warning: {warning}");
        }
        if violations.is_empty() {
            println!("no violations");
        } else {
            for violation in &violations {
                println!("violation: {violation}");
            }
        }
    }
    EXIT_OK
}

fn internal_error(err: impl std::fmt::Display) -> u8 {
    eprintln!("internal error: {err}");
    EXIT_INTERNAL
}

fn print_json(value: &serde_json::Value) {
    print_bytes(&mutagent::dialogflow::serialize_document(value));
}

fn print_bytes(bytes: &[u8]) {
    use std::io::Write;
    std::io::stdout().write_all(bytes).expect("stdout writable");
}
