use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{Database, Form, ModelError};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchField {
    Form,
    Gloss,
    Headword,
    LanguageName,
}

impl FromStr for SearchField {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "form" => Ok(Self::Form),
            "gloss" => Ok(Self::Gloss),
            "headword" => Ok(Self::Headword),
            "language-name" | "language_name" | "language" => Ok(Self::LanguageName),
            other => Err(ModelError::InvalidField(other.to_owned())),
        }
    }
}

impl fmt::Display for SearchField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Form => "form",
            Self::Gloss => "gloss",
            Self::Headword => "headword",
            Self::LanguageName => "language-name",
        })
    }
}

/// A substring query over one field of every form.
#[derive(Debug, Clone)]
pub struct SearchQuery<'q> {
    pub text: &'q str,
    pub field: SearchField,
    /// Restrict hits to one language id.
    pub language: Option<&'q str>,
    /// Strip combining marks from both sides before matching.
    pub fold: bool,
    pub limit: usize,
    pub offset: usize,
}

impl<'q> SearchQuery<'q> {
    pub fn new(text: &'q str, field: SearchField) -> Self {
        Self {
            text,
            field,
            language: None,
            fold: false,
            limit: 50,
            offset: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchHit<'a> {
    pub form: &'a Form,
    /// Char offset of the first match inside the searched field.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchPage<'a> {
    pub total: usize,
    pub hits: Vec<SearchHit<'a>>,
}

impl Database {
    /// Case-insensitive substring search. Hits are ordered by match position,
    /// then form id; `total` counts every match before paging.
    pub fn search(
        &self,
        query: &str,
        field: SearchField,
        limit: usize,
        offset: usize,
    ) -> Result<SearchPage<'_>, ModelError> {
        self.search_with(&SearchQuery {
            limit,
            offset,
            ..SearchQuery::new(query, field)
        })
    }

    pub fn search_with(&self, q: &SearchQuery<'_>) -> Result<SearchPage<'_>, ModelError> {
        if q.limit == 0 {
            return Err(ModelError::InvalidLimit);
        }
        let needle = if q.fold {
            text::folded_key(q.text)
        } else {
            text::search_key(q.text)
        };
        let folded = q.fold.then(|| self.folded());

        let mut matches: Vec<(usize, usize)> = Vec::new();
        for (i, form) in self.forms.iter().enumerate() {
            if q.language.is_some_and(|l| l != form.language_id) {
                continue;
            }
            let key: Option<&str> = match (q.field, folded) {
                (SearchField::Form, None) => Some(&self.idx.form_keys[i]),
                (SearchField::Form, Some(f)) => Some(&f.form[i]),
                (SearchField::Gloss, None) => Some(&self.idx.gloss_keys[i]),
                (SearchField::Gloss, Some(f)) => Some(&f.gloss[i]),
                (SearchField::Headword, _) => {
                    self.idx.cognateset_by_id.get(&form.cognateset_id).map(|&c| match folded {
                        Some(f) => f.headword[c].as_str(),
                        None => self.idx.headword_keys[c].as_str(),
                    })
                }
                (SearchField::LanguageName, _) => {
                    self.idx.language_by_id.get(&form.language_id).map(|&l| match folded {
                        Some(f) => f.language_name[l].as_str(),
                        None => self.idx.language_name_keys[l].as_str(),
                    })
                }
            };
            if let Some(pos) = key.and_then(|k| text::char_find(k, &needle)) {
                matches.push((pos, i));
            }
        }
        // forms are id-sorted, so index order is id order
        matches.sort_unstable();
        let total = matches.len();
        let hits = matches
            .into_iter()
            .skip(q.offset)
            .take(q.limit)
            .map(|(position, i)| SearchHit {
                form: &self.forms[i],
                position,
            })
            .collect();
        Ok(SearchPage { total, hits })
    }
}
