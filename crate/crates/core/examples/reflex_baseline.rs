//! Build a reflex-prediction dataset, split it, and score the identity
//! baseline. Writes train.tsv, test.tsv and pred.tsv when given a directory,
//! which is the hand-off point for an external model.
//!
//! cargo run --example reflex_baseline [OUT_DIR]

use std::fs::File;
use std::path::PathBuf;

use anyhow::Result;
use jambu::cldf::load_wordlist;
use jambu::orthonorm::load_profile;
use jambu::reflex::{evaluate, IdentityPredictor};
use jambu::reflex::{write_examples, write_predictions, PredictionRow};
use jambu::reflex::{clade_path, extract_examples, split, SplitConfig, SplitUnit};

fn main() -> Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let db = load_wordlist(fixtures.join("mini"))?;
    let profile = load_profile(fixtures.join("profiles/inventory.tsv"))?;

    let extraction = extract_examples(&db, "OIA", &clade_path("Indo-Aryan"), &profile)?;
    println!("{} examples, {} forms skipped", extraction.examples.len(), extraction.skipped.len());
    let config = SplitConfig { train_fraction: 0.8, seed: 0, unit: SplitUnit::Form };
    let (train, test) = split(&extraction.examples, &config)?;

    let (report, predictions) = evaluate(&IdentityPredictor, &test)?;
    println!("{report}");

    if let Some(out) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&out)?;
        write_examples(File::create(out.join("train.tsv"))?, &train)?;
        write_examples(File::create(out.join("test.tsv"))?, &test)?;
        let rows: Vec<PredictionRow> = test
            .iter()
            .zip(predictions)
            .map(|(e, p)| PredictionRow {
                cognateset_id: e.cognateset_id.clone(),
                language_tag: e.language_tag.clone(),
                source_tokens: e.source_tokens.clone(),
                predicted_tokens: p,
            })
            .collect();
        write_predictions(File::create(out.join("pred.tsv"))?, &rows)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
