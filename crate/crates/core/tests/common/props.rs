//! Strategies and invariant checks shared by the property tests and the
//! acceptance runner.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use jambu::cldf::{load_wordlist, write_wordlist};
use jambu::model::SearchField;
use jambu::orthonorm::{segment, OrthoProfile};
use jambu::reflex::{split, ReflexExample, SplitConfig, SplitUnit};
use jambu::service::{views, PageRequest};
use jambu::text::nfc;
use jambu::{CognateSet, Database, Form, Language, Source, SourceRef};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

// Cell text: letters with diacritics, CSV metacharacters, and a decomposed
// sequence that canonicalization has to compose.
pub fn cell() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            Just("a"), Just("ṭ"), Just("ā́"), Just("ä"), Just("a\u{0308}"), Just("r\u{0325}"),
            Just(","), Just("\""), Just("'"), Just(" "), Just("x"), Just("Ω"), Just("\n"),
        ],
        0..6,
    )
    .prop_map(|parts| parts.concat())
}

pub fn nonempty_cell() -> impl Strategy<Value = String> {
    cell().prop_map(|s| if s.trim().is_empty() { format!("k{s}k") } else { s })
}

pub fn opt_cell() -> impl Strategy<Value = Option<String>> {
    prop::option::of(nonempty_cell())
}

pub fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z0-9ṭā_-]{1,5}"
}

pub fn extra() -> impl Strategy<Value = BTreeMap<String, String>> {
    prop::collection::btree_map(prop_oneof![Just("Gender".to_owned()), Just("Dialect".to_owned())], nonempty_cell(), 0..2)
}

pub fn source_ref() -> impl Strategy<Value = SourceRef> {
    ("[a-z]{1,6}[0-9]{0,4}", prop::option::of("[0-9]{1,3}(-[0-9]{1,3})?")).prop_map(|(bibkey, pages)| SourceRef { bibkey, pages })
}

pub fn database() -> impl Strategy<Value = Database> {
    let langs = prop::collection::btree_map(
        ident(),
        (
            nonempty_cell(),
            prop::collection::vec("[A-Z][a-z]{0,6}( [a-z]{1,4})?", 0..3),
            prop::option::of((-90.0f64..90.0, -180.0f64..180.0)),
            extra(),
        ),
        0..5,
    );
    let sets = prop::collection::btree_map(ident(), (nonempty_cell(), opt_cell(), opt_cell(), extra()), 0..5);
    let forms = prop::collection::btree_map(
        ident(),
        (
            ident(),
            ident(),
            nonempty_cell(),
            cell(),
            (opt_cell(), opt_cell(), opt_cell(), opt_cell(), opt_cell()),
            prop::collection::vec(source_ref(), 0..3),
            extra(),
        ),
        0..8,
    );
    let sources = prop::collection::btree_map(
        "[a-z]{1,6}[0-9]{0,4}",
        ("(book|article|misc)", prop::collection::btree_map("(author|title|year|note)", "[A-Za-z0-9 .āṭ]{1,12}", 1..4)),
        0..3,
    );
    (langs, sets, forms, sources).prop_map(|(langs, sets, forms, sources)| {
        let languages = langs
            .into_iter()
            .map(|(id, (name, clade, coords, extra))| Language {
                id,
                name,
                clade,
                latitude: coords.map(|c| c.0),
                longitude: coords.map(|c| c.1),
                extra,
            })
            .collect();
        let cognatesets = sets
            .into_iter()
            .map(|(id, (headword, description, notes, extra))| CognateSet { id, headword, description, notes, extra })
            .collect();
        let forms = forms
            .into_iter()
            .map(|(id, (language_id, cognateset_id, form, gloss, (native, ipa, original, subset_id, notes), source_refs, extra))| Form {
                id,
                language_id,
                cognateset_id,
                form,
                gloss,
                native,
                ipa,
                original,
                subset_id,
                notes,
                source_refs,
                extra,
            })
            .collect();
        let sources = sources
            .into_iter()
            .map(|(bibkey, (entry_type, fields))| Source { bibkey, entry_type, fields })
            .collect();
        Database::new(forms, cognatesets, languages, sources)
    })
}


/// Rules over a three-letter alphabet, some anchored.
pub fn profile() -> impl Strategy<Value = OrthoProfile> {
    prop::collection::btree_set(("[abc]{1,3}", 0..4u8), 1..8).prop_map(|rules| {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (g, anchor) in rules {
            let g = match anchor {
                1 => format!("^{g}"),
                2 => format!("{g}$"),
                _ => g,
            };
            if seen.insert(g.clone()) {
                out.push((g.clone(), g.to_uppercase()));
            }
        }
        OrthoProfile::from_rules("random", out).unwrap()
    })
}

pub fn input() -> impl Strategy<Value = String> {
    "[abcd ]{0,16}"
}

/// Does `rule` match `chars` at position `i`, honouring anchors?
pub fn matches_at(grapheme: &str, chars: &[char], i: usize) -> Option<usize> {
    let (mut body, mut start, mut end) = (grapheme, false, false);
    if body.len() > 1 && body.starts_with('^') {
        body = &body[1..];
        start = true;
    }
    if body.len() > 1 && body.ends_with('$') {
        body = &body[..body.len() - 1];
        end = true;
    }
    let b: Vec<char> = body.chars().collect();
    if i + b.len() > chars.len() || chars[i..i + b.len()] != b[..] {
        return None;
    }
    if start && i > 0 && !chars[i - 1].is_whitespace() {
        return None;
    }
    if end && i + b.len() < chars.len() && !chars[i + b.len()].is_whitespace() {
        return None;
    }
    Some(b.len())
}


pub fn search_db() -> impl Strategy<Value = Database> {
    prop::collection::vec(("[ab]{1,4}", "[ab ]{0,6}", 0..3usize), 0..40).prop_map(|rows| {
        let forms = rows
            .into_iter()
            .enumerate()
            .map(|(i, (form, gloss, lang))| Form {
                id: format!("{i:03}"),
                language_id: format!("L{lang}"),
                cognateset_id: "1".into(),
                form,
                gloss,
                ..Default::default()
            })
            .collect();
        let languages = (0..12)
            .map(|i| Language {
                id: format!("L{i}"),
                name: format!("Lang {}", if i % 2 == 0 { "even" } else { "odd" }),
                clade: vec![if i % 3 == 0 { "X" } else { "Y" }.into()],
                ..Default::default()
            })
            .collect();
        Database::new(forms, vec![CognateSet { id: "1".into(), headword: "h".into(), ..Default::default() }], languages, vec![])
    })
}


pub fn examples() -> impl Strategy<Value = Vec<ReflexExample>> {
    prop::collection::vec((0..8u8, "[ptk]{1,3}"), 2..40).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (set, tgt))| ReflexExample {
                cognateset_id: format!("s{set}"),
                source_tokens: vec![format!("x{i}")],
                language_tag: "L".into(),
                target_tokens: tgt.chars().map(String::from).collect(),
            })
            .collect()
    })
}

pub fn cldf_round_trip_holds(db: Database) -> Result<(), TestCaseError> {
    let dir = tempfile::tempdir().unwrap();
    write_wordlist(&db, dir.path()).unwrap();
    let back = load_wordlist(dir.path()).unwrap();
    prop_assert_eq!(&back, &db);
    // writing the reloaded database gives the same bytes
    let again = tempfile::tempdir().unwrap();
    write_wordlist(&back, again.path()).unwrap();
    for name in ["forms.csv", "parameters.csv", "cognates.csv", "languages.csv", "sources.bib", "Wordlist-metadata.json"] {
        prop_assert_eq!(
            std::fs::read(dir.path().join(name)).unwrap(),
            std::fs::read(again.path().join(name)).unwrap(),
            "{} differs", name
        );
    }
    Ok(())
}

pub fn segmentation_reconstructs_input_holds(p: OrthoProfile, s: String) -> Result<(), TestCaseError> {
    let seg = segment(&p, &s);
    prop_assert_eq!(seg.reconstruct(), nfc(&s));
    Ok(())
}

pub fn segmentation_takes_longest_match_holds(p: OrthoProfile, s: String) -> Result<(), TestCaseError> {
    let seg = segment(&p, &s);
    let chars: Vec<char> = s.chars().collect();
    let offset_to_char: HashMap<usize, usize> = s.char_indices().enumerate().map(|(ci, (b, _))| (b, ci)).collect();
    for t in &seg.tokens {
        let i = offset_to_char[&t.offset];
        let longest = p.rules().iter().filter_map(|r| matches_at(&r.grapheme, &chars, i)).max().unwrap();
        prop_assert_eq!(t.grapheme.chars().count(), longest);
    }
    for f in &seg.failures {
        let i = offset_to_char[&f.offset];
        prop_assert!(p.rules().iter().all(|r| matches_at(&r.grapheme, &chars, i).is_none()));
    }
    Ok(())
}

pub fn pages_partition_the_full_result_holds(db: Database, q: String, gloss: bool, limit: usize) -> Result<(), TestCaseError> {
    let field = if gloss { SearchField::Gloss } else { SearchField::Form };
    let all = db.search(&q, field, 10_000, 0).unwrap();
    let mut stitched = Vec::new();
    let mut offset = 0;
    loop {
        let page = db.search(&q, field, limit, offset).unwrap();
        prop_assert_eq!(page.total, all.total);
        prop_assert!(page.hits.len() <= limit);
        if page.hits.is_empty() {
            break;
        }
        stitched.extend(page.hits.iter().map(|h| h.form.id.clone()));
        offset += limit;
    }
    let want: Vec<String> = all.hits.iter().map(|h| h.form.id.clone()).collect();
    prop_assert_eq!(stitched, want);
    prop_assert_eq!(all.hits.len(), all.total);

    // the HTTP view pages the same way
    let params: HashMap<String, String> = [
        ("q".to_owned(), q.clone()),
        ("field".to_owned(), if gloss { "gloss" } else { "form" }.to_owned()),
        ("limit".to_owned(), limit.to_string()),
        ("offset".to_owned(), "0".to_owned()),
    ].into_iter().collect();
    let view = views::search(&db, &params).unwrap();
    prop_assert_eq!(view.total, all.total);
    let first: Vec<&str> = view.items.iter().map(|r| r.form_id).collect();
    let want_first: Vec<&str> = all.hits.iter().take(limit).map(|h| h.form.id.as_str()).collect();
    prop_assert_eq!(first, want_first);
    Ok(())
}

pub fn language_pages_partition_holds(db: Database, clade: Option<&'static str>, limit: usize) -> Result<(), TestCaseError> {
    let all = views::languages(&db, clade, None, PageRequest { limit: 10_000, offset: 0 });
    let mut ids = Vec::new();
    for offset in (0..all.total + limit).step_by(limit) {
        let page = views::languages(&db, clade, None, PageRequest { limit, offset });
        prop_assert_eq!(page.total, all.total);
        ids.extend(page.items.iter().map(|r| r.id.to_owned()));
    }
    let want: Vec<String> = all.items.iter().map(|r| r.id.to_owned()).collect();
    prop_assert_eq!(ids, want);
    Ok(())
}

pub fn split_is_deterministic_and_exhaustive_holds(ex: Vec<ReflexExample>, seed: u64, f: f64, by_set: bool) -> Result<(), TestCaseError> {
    let unit = if by_set { SplitUnit::Cognateset } else { SplitUnit::Form };
    let cfg = SplitConfig { train_fraction: f, seed, unit };
    let sets: BTreeSet<&str> = ex.iter().map(|e| e.cognateset_id.as_str()).collect();
    let first = split(&ex, &cfg);
    if by_set && sets.len() < 2 {
        prop_assert!(first.is_err());
        return Ok(());
    }
    let (train, test) = first.unwrap();
    let (train2, test2) = split(&ex, &cfg).unwrap();
    prop_assert_eq!(&train, &train2);
    prop_assert_eq!(&test, &test2);

    // every example lands on exactly one side (sources are unique)
    let mut all: Vec<&str> = train.iter().chain(&test).map(|e| e.source_tokens[0].as_str()).collect();
    all.sort_unstable();
    let mut want: Vec<&str> = ex.iter().map(|e| e.source_tokens[0].as_str()).collect();
    want.sort_unstable();
    prop_assert_eq!(all, want);
    prop_assert!(!train.is_empty() && !test.is_empty());

    let n = ex.len();
    let target = ((f * n as f64).round() as usize).clamp(1, n - 1);
    if by_set {
        let tr: BTreeSet<&str> = train.iter().map(|e| e.cognateset_id.as_str()).collect();
        let te: BTreeSet<&str> = test.iter().map(|e| e.cognateset_id.as_str()).collect();
        prop_assert!(tr.is_disjoint(&te));
    } else {
        prop_assert_eq!(train.len(), target);
    }
    Ok(())
}
