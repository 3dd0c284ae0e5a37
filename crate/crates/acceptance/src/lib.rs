//! Reporting helpers for the `acceptance` test target.

use std::path::PathBuf;

/// Result of one acceptance criterion.
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
}

impl Outcome {
    pub fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

/// The repository's `data/` directory.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Prints `[PASS]` or `[FAIL]` plus details for each outcome and a tally.
/// Returns whether everything passed.
pub fn report(outcomes: &[(&str, Outcome)]) -> bool {
    println!("acceptance criteria");
    let mut passed = 0;
    for (i, (name, o)) in outcomes.iter().enumerate() {
        passed += usize::from(o.pass);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {}", i + 1, o.summary);
        for d in &o.details {
            println!("       {d}");
        }
    }
    println!("{passed}/{} criteria passed", outcomes.len());
    passed == outcomes.len()
}
