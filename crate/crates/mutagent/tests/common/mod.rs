//! Shared helpers for the integration suites.
#![allow(dead_code)] // each test target uses its own subset

use std::path::PathBuf;

pub const CORPUS: [&str; 4] = ["rooms", "minibook", "scheduler", "device"];

pub fn fixture_agent(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/agents")
        .join(name)
}

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

/// Runs `check` and prints one `[PASS]`/`[FAIL]` line for the criterion.
pub fn criterion<F>(number: u8, title: &str, check: F)
where
    F: FnOnce() + std::panic::UnwindSafe,
{
    let outcome = std::panic::catch_unwind(check);
    match &outcome {
        Ok(()) => println!("[PASS] criterion {number}: {title}"),
        Err(_) => println!("[FAIL] criterion {number}: {title}"),
    }
    if let Err(panic) = outcome {
        std::panic::resume_unwind(panic);
    }
}
