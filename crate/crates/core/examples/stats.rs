//! Per-family language, cognate-set and lemma counts.
//!
//! cargo run --example stats [DATASET_DIR]

use std::path::PathBuf;

use anyhow::Result;
use jambu::cldf::load_wordlist;
use jambu::stats::dataset_stats;

fn main() -> Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini"));
    let stats = dataset_stats(&load_wordlist(dir)?);
    for f in &stats.families {
        println!("{:<16} {:>5} {:>6} {:>7}", f.family, f.languages, f.cognate_sets, f.lemmata);
    }
    println!("{:<16} {:>5} {:>6} {:>7}", "total", stats.languages, stats.cognate_sets, stats.lemmata);
    Ok(())
}
