//! Field-level agreement between the parser and hand-checked readings of the
//! golden entry corpus.

mod common;

#[test]
fn golden_corpus_agrees_field_by_field() {
    let a = common::golden::check();
    assert!(a.entries >= 50, "golden corpus has {} entries", a.entries);
    assert!(a.mismatches.is_empty(), "{} disagreements:\n{}", a.mismatches.len(), a.mismatches.join("\n"));
    assert!(a.fields > 2000, "{} fields", a.fields);
}
