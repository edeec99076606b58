use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::text::nfc;

#[derive(Debug, Error)]
pub enum AbbrevError {
    #[error("line {line}: abbreviation {abbrev:?} is listed twice")]
    Duplicate { line: usize, abbrev: String },
    #[error("abbreviation {0:?} is both a language and ignored")]
    Conflict(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Source abbreviations (`"Pk."`, `"S."`, `"Pash. Deg."`) mapped to language
/// ids, plus abbreviations that name text sources rather than languages.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbbreviationTable {
    languages: BTreeMap<String, String>,
    ignored: BTreeSet<String>,
    /// Every key, longest first, for prefix matching of multi-word labels.
    by_length: Vec<String>,
}

impl AbbreviationTable {
    pub fn new<A, L, I>(languages: impl IntoIterator<Item = (A, L)>, ignored: impl IntoIterator<Item = I>) -> Result<Self, AbbrevError>
    where
        A: AsRef<str>,
        L: AsRef<str>,
        I: AsRef<str>,
    {
        let mut t = Self::default();
        for (i, (a, l)) in languages.into_iter().enumerate() {
            t.add_language(i + 1, a.as_ref(), l.as_ref())?;
        }
        for (i, a) in ignored.into_iter().enumerate() {
            t.add_ignored(i + 1, a.as_ref())?;
        }
        t.finish()
    }

    fn add_language(&mut self, line: usize, abbrev: &str, language_id: &str) -> Result<(), AbbrevError> {
        let abbrev = nfc(abbrev.trim());
        if abbrev.is_empty() {
            return Err(AbbrevError::Malformed { line, message: "empty abbreviation".into() });
        }
        if self.languages.insert(abbrev.clone(), nfc(language_id.trim())).is_some() {
            return Err(AbbrevError::Duplicate { line, abbrev });
        }
        Ok(())
    }

    fn add_ignored(&mut self, line: usize, abbrev: &str) -> Result<(), AbbrevError> {
        let abbrev = nfc(abbrev.trim());
        if abbrev.is_empty() {
            return Err(AbbrevError::Malformed { line, message: "empty abbreviation".into() });
        }
        if !self.ignored.insert(abbrev.clone()) {
            return Err(AbbrevError::Duplicate { line, abbrev });
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Self, AbbrevError> {
        if let Some(a) = self.ignored.iter().find(|a| self.languages.contains_key(*a)) {
            return Err(AbbrevError::Conflict(a.clone()));
        }
        self.by_length = self
            .languages
            .keys()
            .chain(self.ignored.iter())
            .cloned()
            .collect();
        self.by_length
            .sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(self)
    }

    /// Reads the CSV form: an `abbrev,language_id` header, then one row per
    /// abbreviation. A row whose second cell is missing or empty adds the
    /// abbreviation to the ignore list.
    pub fn parse_csv(text: &str) -> Result<Self, AbbrevError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut t = Self::default();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 1;
            let rec = rec.map_err(|e| AbbrevError::Malformed { line, message: e.to_string() })?;
            let first = rec.get(0).unwrap_or("").trim();
            let second = rec.get(1).unwrap_or("").trim();
            if line == 1 && first.eq_ignore_ascii_case("abbrev") {
                continue;
            }
            if first.is_empty() && second.is_empty() {
                continue;
            }
            if rec.len() > 2 && rec.iter().skip(2).any(|c| !c.trim().is_empty()) {
                return Err(AbbrevError::Malformed { line, message: "expected at most two columns".into() });
            }
            if second.is_empty() {
                t.add_ignored(line, first)?;
            } else {
                t.add_language(line, first, second)?;
            }
        }
        t.finish()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AbbrevError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AbbrevError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_csv(&text)
    }

    pub fn language(&self, abbrev: &str) -> Option<&str> {
        self.languages.get(abbrev).map(String::as_str)
    }

    pub fn is_ignored(&self, abbrev: &str) -> bool {
        self.ignored.contains(abbrev)
    }

    /// First abbreviation (in sort order) mapping to `language_id`.
    pub fn abbreviation_for(&self, language_id: &str) -> Option<&str> {
        self.languages
            .iter()
            .find(|(_, l)| l.as_str() == language_id)
            .map(|(a, _)| a.as_str())
    }

    /// Longest-first iteration over all keys, languages and ignored alike.
    pub(crate) fn keys_longest_first(&self) -> impl Iterator<Item = &str> {
        self.by_length.iter().map(String::as_str)
    }

    pub fn languages(&self) -> impl Iterator<Item = (&str, &str)> {
        self.languages.iter().map(|(a, l)| (a.as_str(), l.as_str()))
    }
}
