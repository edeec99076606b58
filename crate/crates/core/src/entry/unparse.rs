use super::{AbbreviationTable, ParsedEntry, ReflexRecord};

fn quote(gloss: &str) -> String {
    if gloss.contains('’') {
        format!("'{gloss}'")
    } else {
        format!("‘{gloss}’")
    }
}

/// Renders an entry back into the plain-text shape [`super::parse_entry`]
/// reads. Inherited glosses are written out explicitly and stacked language
/// abbreviations become one clause per language, so the text is not the
/// original, but parsing it again yields the same headwords and reflexes.
/// A language without an abbreviation in `abbrevs` is written by its id.
pub fn unparse(entry: &ParsedEntry, abbrevs: &AbbreviationTable) -> String {
    let mut out = entry.entry_number.clone();
    let mut label: Option<&str> = None;
    for (i, hw) in entry.headwords.iter().enumerate() {
        if i > 0 {
            match hw.group_label.as_deref() {
                Some(g) if Some(g) != label => {
                    out.push(' ');
                    out.push_str(g);
                    out.push('.');
                }
                _ => out.push(','),
            }
        }
        label = hw.group_label.as_deref();
        out.push(' ');
        out.push_str(&hw.lemma);
        for t in &hw.tags {
            out.push(' ');
            out.push_str(t);
        }
        if let Some(g) = &hw.gloss {
            out.push(' ');
            out.push_str(&quote(g));
        }
        for s in &hw.sigla {
            out.push(' ');
            out.push_str(s);
        }
    }
    if let Some(e) = &entry.etymology_note {
        out.push_str(&format!(" [{e}]"));
    }

    let mut clauses: Vec<String> = Vec::new();
    let mut group: Option<&str> = None;
    let mut i = 0;
    while i < entry.reflexes.len() {
        let r = &entry.reflexes[i];
        let mut j = i + 1;
        while j < entry.reflexes.len()
            && entry.reflexes[j].language_id == r.language_id
            && entry.reflexes[j].group_label == r.group_label
        {
            j += 1;
        }
        let mut clause = String::new();
        if let Some(g) = r.group_label.as_deref() {
            if group != Some(g) {
                clause.push_str(g);
                clause.push_str(". ");
            }
        }
        group = r.group_label.as_deref();
        clause.push_str(abbrevs.abbreviation_for(&r.language_id).unwrap_or(&r.language_id));
        let items: Vec<String> = entry.reflexes[i..j].iter().map(item).collect();
        clause.push(' ');
        clause.push_str(&items.join(", "));
        clauses.push(clause);
        i = j;
    }
    clauses.extend(entry.notes.iter().cloned());
    if !clauses.is_empty() {
        out.push(' ');
        out.push_str(&clauses.join("; "));
    }
    out
}

fn item(r: &ReflexRecord) -> String {
    let mut s = r.lemma.clone();
    if let Some(g) = r.gender.tag() {
        s.push(' ');
        s.push_str(g);
    }
    for t in &r.tags {
        s.push(' ');
        s.push_str(t);
    }
    if let Some(g) = &r.gloss {
        s.push(' ');
        s.push_str(&quote(g));
    }
    for n in &r.notes {
        s.push(' ');
        s.push_str(n);
    }
    s
}
