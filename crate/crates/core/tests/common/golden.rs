//! Comparison of parses against the hand-checked golden readings.

use jambu::entry::{parse_entry, split_entries, AbbreviationTable, Gender, ParsedEntry};

use super::fixture;

#[derive(Debug, Default, PartialEq)]
pub struct Expected {
    pub number: String,
    pub lines: Vec<String>,
}

pub fn dash(s: Option<&str>) -> String {
    match s {
        Some(v) if !v.is_empty() => v.to_owned(),
        _ => "-".into(),
    }
}

pub fn joined(v: &[String]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.join(" ")
    }
}

pub fn gender(g: Gender) -> &'static str {
    match g {
        Gender::M => "m",
        Gender::F => "f",
        Gender::N => "n",
        Gender::None => "-",
    }
}

/// Renders a parse in the expected-file line format.
pub fn lines(e: &ParsedEntry) -> Vec<String> {
    let mut out = Vec::new();
    for (i, h) in e.headwords.iter().enumerate() {
        out.push(format!(
            "H | {} | {} | {} | {} | {}",
            dash(e.effective_label(i).as_deref()),
            h.lemma,
            dash(h.gloss.as_deref()),
            joined(&h.tags),
            joined(&h.sigla)
        ));
    }
    if let Some(et) = &e.etymology_note {
        out.push(format!("E | {et}"));
    }
    for r in &e.reflexes {
        out.push(format!(
            "R | {} | {} | {} | {} | {}",
            dash(r.group_label.as_deref()),
            r.language_id,
            r.lemma,
            gender(r.gender),
            dash(r.gloss.as_deref())
        ));
    }
    for n in &e.notes {
        out.push(format!("N | {n}"));
    }
    out
}

pub fn read_expected() -> Vec<Expected> {
    let text = std::fs::read_to_string(fixture("golden/expected.txt")).unwrap();
    let mut out: Vec<Expected> = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if let Some(num) = line.strip_prefix("= ") {
            out.push(Expected { number: num.to_owned(), lines: vec![] });
        } else {
            out.last_mut().expect("record before header").lines.push(line.to_owned());
        }
    }
    out
}

pub fn order(lines: &[String], tag: char) -> Vec<&String> {
    lines.iter().filter(|l| l.starts_with(tag)).collect()
}

/// Entries checked, fields compared, and every disagreement found.
pub struct Agreement {
    pub entries: usize,
    pub fields: usize,
    pub mismatches: Vec<String>,
}

pub fn check() -> Agreement {
    let abbrevs = AbbreviationTable::load(fixture("cdial/abbrev.csv")).unwrap();
    let text = std::fs::read_to_string(fixture("golden/entries.txt")).unwrap();
    let entries = split_entries(&text);
    let expected = read_expected();
    let mut fields = 0usize;
    let mut mismatches = Vec::new();
    if entries.len() != expected.len() {
        mismatches.push(format!("{} entries but {} expected readings", entries.len(), expected.len()));
    }
    for (src, want) in entries.iter().zip(&expected) {
        let parsed = match parse_entry(src, &abbrevs) {
            Ok(p) => p,
            Err(e) => {
                mismatches.push(format!("{}: parse error {e}", want.number));
                continue;
            }
        };
        if parsed.entry_number != want.number {
            mismatches.push(format!("number {} vs {}", parsed.entry_number, want.number));
        }
        let got = lines(&parsed);
        for tag in ['H', 'E', 'R', 'N'] {
            let (g, w) = (order(&got, tag), order(&want.lines, tag));
            if g != w {
                mismatches.push(format!("{} {tag}:\n  got  {g:?}\n  want {w:?}", want.number));
            }
            fields += w.iter().map(|l| l.split(" | ").count() - 1).sum::<usize>();
        }
    }
    Agreement { entries: entries.len(), fields, mismatches }
}
