//! Substring search over forms and glosses, with and without diacritic
//! folding, plus a look at one entry the way the HTTP API serves it.
//!
//! cargo run --example search [QUERY]

use std::path::PathBuf;

use anyhow::Result;
use jambu::cldf::load_wordlist;
use jambu::model::{SearchField, SearchQuery};
use jambu::service::views;

fn main() -> Result<()> {
    let db = load_wordlist(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini"))?;
    let q = std::env::args().nth(1).unwrap_or_else(|| "aksi".into());

    for (label, field, fold) in [("form", SearchField::Form, false), ("form, folded", SearchField::Form, true), ("gloss", SearchField::Gloss, false)] {
        let mut query = SearchQuery::new(&q, field);
        query.fold = fold;
        let page = db.search_with(&query)?;
        println!("{label}: {} hit(s)", page.total);
        for h in &page.hits {
            println!("  {} {} {} '{}'", h.form.id, h.form.language_id, h.form.form, h.form.gloss);
        }
    }

    let entry = views::entry(&db, "43").map_err(|e| anyhow::anyhow!("{}", e.message))?;
    println!("{}", serde_json::to_string_pretty(&entry)?);
    Ok(())
}
