//! Parse one etymological entry and print the records it turns into.
//!
//! cargo run --example parse_entry [ENTRY_FILE]

use std::path::PathBuf;

use anyhow::Result;
use jambu::entry::{entry_to_records, parse_entry, AbbreviationTable};

fn main() -> Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| fixtures.join("cdial/fig2.txt"));
    let abbrevs = AbbreviationTable::load(fixtures.join("cdial/abbrev.csv"))?;
    let text = std::fs::read_to_string(path)?;

    let entry = parse_entry(text.trim(), &abbrevs)?;
    for (i, h) in entry.headwords.iter().enumerate() {
        println!("headword {} {:?}", entry.effective_label(i).unwrap_or_default(), h);
    }
    let (set, forms) = entry_to_records(&entry, "OIA");
    println!("cognate set {} {} '{}'", set.id, set.headword, set.description.as_deref().unwrap_or(""));
    for f in forms {
        println!("  {:<8} {:<4} {:<16} {}", f.id, f.language_id, f.form, f.gloss);
    }
    Ok(())
}
