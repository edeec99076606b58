use super::{Headword, ParsedEntry, ReflexRecord};
use crate::model::{CognateSet, Form};

fn joined(parts: impl IntoIterator<Item = String>, sep: &str) -> Option<String> {
    let v: Vec<String> = parts.into_iter().filter(|s| !s.is_empty()).collect();
    (!v.is_empty()).then(|| v.join(sep))
}

/// Flattens an entry into a cognate set plus one form per headword and per
/// reflex. Headwords are attributed to `ancestor_language_id`; form ids are
/// `"{entry_number}-{n}"` counting from 1 in entry order.
pub fn entry_to_records(entry: &ParsedEntry, ancestor_language_id: &str) -> (CognateSet, Vec<Form>) {
    let first = entry.headwords.first();
    let set = CognateSet {
        id: entry.entry_number.clone(),
        headword: first.map(|h| h.lemma.clone()).unwrap_or_default(),
        description: first.and_then(|h| h.gloss.clone()),
        notes: joined(
            entry
                .etymology_note
                .iter()
                .map(|e| format!("[{e}]"))
                .chain(entry.notes.iter().cloned()),
            "; ",
        ),
        ..CognateSet::default()
    };

    let mut forms = Vec::with_capacity(entry.headwords.len() + entry.reflexes.len());
    let mut next_id = {
        let mut n = 0usize;
        let num = entry.entry_number.clone();
        move || {
            n += 1;
            format!("{num}-{n}")
        }
    };
    for (i, hw) in entry.headwords.iter().enumerate() {
        forms.push(headword_form(next_id(), entry, i, hw, ancestor_language_id));
    }
    for r in &entry.reflexes {
        forms.push(reflex_form(next_id(), entry, r));
    }
    (set, forms)
}

fn headword_form(id: String, entry: &ParsedEntry, index: usize, hw: &Headword, lang: &str) -> Form {
    Form {
        id,
        language_id: lang.to_owned(),
        cognateset_id: entry.entry_number.clone(),
        form: hw.lemma.clone(),
        gloss: hw.gloss.clone().unwrap_or_default(),
        subset_id: entry.effective_label(index),
        notes: joined(hw.tags.iter().chain(&hw.sigla).cloned(), " "),
        ..Form::default()
    }
}

fn reflex_form(id: String, entry: &ParsedEntry, r: &ReflexRecord) -> Form {
    let mut f = Form {
        id,
        language_id: r.language_id.clone(),
        cognateset_id: entry.entry_number.clone(),
        form: r.lemma.clone(),
        gloss: r.gloss.clone().unwrap_or_default(),
        subset_id: r.group_label.clone(),
        notes: joined(r.tags.iter().chain(&r.notes).cloned(), " "),
        ..Form::default()
    };
    if let Some(g) = r.gender.tag() {
        f.extra.insert("Gender".to_owned(), g.to_owned());
    }
    f
}
