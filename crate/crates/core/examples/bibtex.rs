//! Read a BibTeX file, report entries that could not be parsed, and write
//! the rest back out.
//!
//! cargo run --example bibtex [FILE.bib]

use std::path::PathBuf;

use anyhow::Result;
use jambu::cldf::{parse_bibtex, write_bibtex};

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini/sources.bib"));
    let parsed = parse_bibtex(&std::fs::read_to_string(path)?);
    for w in &parsed.warnings {
        eprintln!("line {}: {}", w.line, w.message);
    }
    for s in &parsed.sources {
        println!("{} ({}): {}", s.bibkey, s.entry_type, s.fields.get("title").map(String::as_str).unwrap_or("-"));
    }
    print!("{}", write_bibtex(&parsed.sources));
    Ok(())
}
