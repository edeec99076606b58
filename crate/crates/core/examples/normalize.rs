//! Normalize forms with an orthography profile and show the conversion
//! report, including the characters no rule covers.
//!
//! cargo run --example normalize [PROFILE] [FORM...]

use std::path::PathBuf;

use anyhow::Result;
use jambu::orthonorm::{conversion_report, load_profile, normalize, segment};

fn main() -> Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut args = std::env::args().skip(1);
    let profile = load_profile(args.next().map(PathBuf::from).unwrap_or_else(|| fixtures.join("profiles/romani.tsv")))?;
    let mut forms: Vec<String> = args.collect();
    if forms.is_empty() {
        forms = ["učhar", "jakh", "ćiriklo"].map(String::from).to_vec();
    }

    for f in &forms {
        let (out, ok) = normalize(&profile, f);
        let seg = segment(&profile, f);
        let tokens: Vec<&str> = seg.tokens.iter().map(|t| t.grapheme.as_str()).collect();
        println!("{f} -> {out} {} [{}]", if ok { "ok" } else { "FAILED" }, tokens.join(" "));
    }
    let report = conversion_report(&profile, &forms);
    println!("{report}");
    for (c, n) in &report.histogram {
        println!("  U+{:04X} {c} x{n}", *c as u32);
    }
    Ok(())
}
