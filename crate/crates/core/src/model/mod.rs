//! In-memory cognate database.
//!
//! A [`Database`] is built once from its four collections and is immutable
//! afterwards. Construction canonicalizes every record (NFC text, empty
//! optionals collapsed to `None`, rows sorted by id) and builds the lookup
//! indices, so two databases holding the same rows in any order compare equal.

mod search;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{self, nfc_in_place, nfc_opt};

pub use search::{SearchField, SearchHit, SearchPage, SearchQuery};
pub use validate::{ValidationReport, Violation, ViolationKind};

/// Auxiliary columns carried through load/write untouched.
pub type Extra = BTreeMap<String, String>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown id: {0}")]
    UnknownId(String),
    #[error("invalid search field: {0} (expected form, gloss, headword or language-name)")]
    InvalidField(String),
    #[error("limit must be at least 1")]
    InvalidLimit,
}

/// A bibliography reference attached to a form, `bibkey[pages]` on disk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceRef {
    pub bibkey: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pages: Option<String>,
}

impl SourceRef {
    pub fn new(bibkey: impl Into<String>) -> Self {
        Self {
            bibkey: bibkey.into(),
            pages: None,
        }
    }

    /// Parses `key` or `key[pages]`.
    pub fn parse(raw: &str) -> Self {
        let raw = raw.trim();
        match raw.find('[') {
            Some(open) if raw.ends_with(']') => Self {
                bibkey: raw[..open].trim().to_owned(),
                pages: Some(raw[open + 1..raw.len() - 1].to_owned()).filter(|p| !p.is_empty()),
            },
            _ => Self::new(raw),
        }
    }

    pub fn render(&self) -> String {
        match &self.pages {
            Some(p) => format!("{}[{}]", self.bibkey, p),
            None => self.bibkey.clone(),
        }
    }
}

/// One lemma in one lect.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Form {
    pub id: String,
    pub language_id: String,
    pub cognateset_id: String,
    /// Normalized transcription.
    pub form: String,
    /// English gloss, empty when the source gives none.
    pub gloss: String,
    pub native: Option<String>,
    pub ipa: Option<String>,
    /// Unnormalized spelling as printed in the source.
    pub original: Option<String>,
    /// Finer-grained cognate set label. Stored verbatim.
    pub subset_id: Option<String>,
    pub notes: Option<String>,
    pub source_refs: Vec<SourceRef>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: Extra,
}

/// A headword grouping cognate forms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CognateSet {
    pub id: String,
    pub headword: String,
    pub description: Option<String>,
    pub notes: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: Extra,
}

/// A lect. Dialects are simply further rows; grouping lives in `clade`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Language {
    pub id: String,
    pub name: String,
    /// Subgroup path from the family root, e.g. `["Indo-Aryan", "Northwestern"]`.
    pub clade: Vec<String>,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: Extra,
}

impl Language {
    /// First element of the clade path, if any.
    pub fn family(&self) -> Option<&str> {
        self.clade.first().map(String::as_str)
    }

    /// True when `prefix` is a leading subsequence of the clade path.
    pub fn in_clade(&self, prefix: &[String]) -> bool {
        prefix.len() <= self.clade.len() && self.clade.iter().zip(prefix).all(|(a, b)| a == b)
    }

    pub fn coordinates(&self) -> Option<(f64, f64)> {
        Some((self.latitude?, self.longitude?))
    }
}

/// A `sources.bib` entry.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Source {
    pub bibkey: String,
    pub entry_type: String,
    pub fields: BTreeMap<String, String>,
}

impl Form {
    fn canonicalize(&mut self) {
        for s in [
            &mut self.id,
            &mut self.language_id,
            &mut self.cognateset_id,
            &mut self.form,
            &mut self.gloss,
        ] {
            nfc_in_place(s);
        }
        for s in [
            &mut self.native,
            &mut self.ipa,
            &mut self.original,
            &mut self.subset_id,
            &mut self.notes,
        ] {
            nfc_opt(s);
        }
        for r in &mut self.source_refs {
            nfc_in_place(&mut r.bibkey);
            nfc_opt(&mut r.pages);
        }
        canonical_extra(&mut self.extra);
    }
}

impl CognateSet {
    fn canonicalize(&mut self) {
        nfc_in_place(&mut self.id);
        nfc_in_place(&mut self.headword);
        nfc_opt(&mut self.description);
        nfc_opt(&mut self.notes);
        canonical_extra(&mut self.extra);
    }
}

impl Language {
    fn canonicalize(&mut self) {
        nfc_in_place(&mut self.id);
        nfc_in_place(&mut self.name);
        self.clade.iter_mut().for_each(nfc_in_place);
        canonical_extra(&mut self.extra);
    }
}

impl Source {
    fn canonicalize(&mut self) {
        nfc_in_place(&mut self.bibkey);
        self.fields.values_mut().for_each(nfc_in_place);
    }
}

fn canonical_extra(extra: &mut Extra) {
    extra.retain(|_, v| !v.is_empty());
    extra.values_mut().for_each(nfc_in_place);
}

#[derive(Debug, Default)]
struct Indices {
    form_by_id: HashMap<String, usize>,
    cognateset_by_id: HashMap<String, usize>,
    language_by_id: HashMap<String, usize>,
    forms_by_language: HashMap<String, Vec<usize>>,
    forms_by_cognateset: HashMap<String, Vec<usize>>,
    form_keys: Vec<String>,
    gloss_keys: Vec<String>,
    headword_keys: Vec<String>,
    language_name_keys: Vec<String>,
}

/// Lowercased copies of every searchable field with diacritics stripped.
#[derive(Debug)]
struct FoldedKeys {
    form: Vec<String>,
    gloss: Vec<String>,
    headword: Vec<String>,
    language_name: Vec<String>,
}

#[derive(Debug, Default)]
pub struct Database {
    forms: Vec<Form>,
    cognatesets: Vec<CognateSet>,
    languages: Vec<Language>,
    sources: Vec<Source>,
    idx: Indices,
    folded: OnceLock<FoldedKeys>,
}

impl PartialEq for Database {
    fn eq(&self, other: &Self) -> bool {
        self.forms == other.forms
            && self.cognatesets == other.cognatesets
            && self.languages == other.languages
            && self.sources == other.sources
    }
}

impl Clone for Database {
    fn clone(&self) -> Self {
        Self::new(
            self.forms.clone(),
            self.cognatesets.clone(),
            self.languages.clone(),
            self.sources.clone(),
        )
    }
}

impl Database {
    pub fn new(
        mut forms: Vec<Form>,
        mut cognatesets: Vec<CognateSet>,
        mut languages: Vec<Language>,
        mut sources: Vec<Source>,
    ) -> Self {
        forms.iter_mut().for_each(Form::canonicalize);
        cognatesets.iter_mut().for_each(CognateSet::canonicalize);
        languages.iter_mut().for_each(Language::canonicalize);
        sources.iter_mut().for_each(Source::canonicalize);
        forms.sort_by(|a, b| a.id.cmp(&b.id));
        cognatesets.sort_by(|a, b| a.id.cmp(&b.id));
        languages.sort_by(|a, b| a.id.cmp(&b.id));
        sources.sort_by(|a, b| a.bibkey.cmp(&b.bibkey));

        let mut idx = Indices::default();
        for (i, f) in forms.iter().enumerate() {
            idx.form_by_id.entry(f.id.clone()).or_insert(i);
            idx.forms_by_language
                .entry(f.language_id.clone())
                .or_default()
                .push(i);
            idx.forms_by_cognateset
                .entry(f.cognateset_id.clone())
                .or_default()
                .push(i);
            idx.form_keys.push(text::search_key(&f.form));
            idx.gloss_keys.push(text::search_key(&f.gloss));
        }
        for (i, c) in cognatesets.iter().enumerate() {
            idx.cognateset_by_id.entry(c.id.clone()).or_insert(i);
            idx.headword_keys.push(text::search_key(&c.headword));
        }
        for (i, l) in languages.iter().enumerate() {
            idx.language_by_id.entry(l.id.clone()).or_insert(i);
            idx.language_name_keys.push(text::search_key(&l.name));
        }

        Self {
            forms,
            cognatesets,
            languages,
            sources,
            idx,
            folded: OnceLock::new(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn cognatesets(&self) -> &[CognateSet] {
        &self.cognatesets
    }

    pub fn languages(&self) -> &[Language] {
        &self.languages
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn into_parts(self) -> (Vec<Form>, Vec<CognateSet>, Vec<Language>, Vec<Source>) {
        (self.forms, self.cognatesets, self.languages, self.sources)
    }

    pub fn form(&self, id: &str) -> Option<&Form> {
        self.idx.form_by_id.get(id).map(|&i| &self.forms[i])
    }

    pub fn cognateset(&self, id: &str) -> Option<&CognateSet> {
        self.idx.cognateset_by_id.get(id).map(|&i| &self.cognatesets[i])
    }

    pub fn language(&self, id: &str) -> Option<&Language> {
        self.idx.language_by_id.get(id).map(|&i| &self.languages[i])
    }

    /// Forms of one language in id order. Unknown languages yield nothing.
    pub fn forms_of_language<'a>(&'a self, language_id: &str) -> impl Iterator<Item = &'a Form> {
        self.idx
            .forms_by_language
            .get(language_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.forms[i])
    }

    pub fn form_count(&self, language_id: &str) -> usize {
        self.idx
            .forms_by_language
            .get(language_id)
            .map_or(0, Vec::len)
    }

    /// Every form linked to `cognateset_id`, id-sorted.
    pub fn forms_in_cognateset(&self, cognateset_id: &str) -> Result<Vec<&Form>, ModelError> {
        if self.cognateset(cognateset_id).is_none() {
            return Err(ModelError::UnknownId(cognateset_id.to_owned()));
        }
        Ok(self.cognateset_members(cognateset_id).collect())
    }

    /// Like [`Database::forms_in_cognateset`] but without requiring the set row.
    pub fn cognateset_members<'a>(&'a self, cognateset_id: &str) -> impl Iterator<Item = &'a Form> {
        self.idx
            .forms_by_cognateset
            .get(cognateset_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.forms[i])
    }

    /// Ids of cognate sets referenced by at least one form, sorted.
    pub fn referenced_cognateset_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self
            .idx
            .forms_by_cognateset
            .keys()
            .map(String::as_str)
            .collect();
        ids.sort_unstable();
        ids
    }

    fn folded(&self) -> &FoldedKeys {
        self.folded.get_or_init(|| FoldedKeys {
            form: self.forms.iter().map(|f| text::folded_key(&f.form)).collect(),
            gloss: self.forms.iter().map(|f| text::folded_key(&f.gloss)).collect(),
            headword: self
                .cognatesets
                .iter()
                .map(|c| text::folded_key(&c.headword))
                .collect(),
            language_name: self
                .languages
                .iter()
                .map(|l| text::folded_key(&l.name))
                .collect(),
        })
    }
}
