//! Load a CLDF wordlist and check its referential integrity.
//!
//! cargo run --example load_validate [DATASET_DIR]

use std::path::PathBuf;

use anyhow::Result;
use jambu::cldf::load_wordlist_with_report;

fn main() -> Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/dangling"));
    let (db, load) = load_wordlist_with_report(&dir)?;
    println!("{} forms, {} cognate sets, {} languages, {} sources", db.forms().len(), db.cognatesets().len(), db.languages().len(), db.sources().len());
    println!("load report: {load:?}");

    let report = db.validate();
    for v in &report.violations {
        println!("{v}");
    }
    println!("{} violation(s)", report.len());
    Ok(())
}
