//! Parser for plain-text dictionary entries in the CDIAL shape:
//!
//! ```text
//! 454 ápavartayati tr. 'turns away from' RV. 2. apavṛtta- 'reversed' ŚāṅkhŚr. [√vṛt1]
//! 1. Pk. ōvattēi 'causes to turn back'; S. oṭī f. 'turning over ...'; 2. G. oṭvũ 'to hem', ...
//! ```
//!
//! The head block lists one or more headwords, optionally numbered into
//! groups. The body is a `;`-separated list of clauses, each a language
//! abbreviation followed by comma-separated lemmata. Cross-references
//! (`cf.`, `ext.`, `See`) are kept verbatim in notes.

mod abbrev;
mod lexer;
mod parser;
mod records;
mod unparse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use abbrev::{AbbrevError, AbbreviationTable};
pub use parser::{parse_entry, split_entries, GRAMMATICAL_TAGS, NOTE_MARKERS};
pub use records::entry_to_records;
pub use unparse::unparse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    M,
    F,
    N,
    #[default]
    None,
}

impl Gender {
    pub fn from_tag(tag: &str) -> Option<Gender> {
        match tag {
            "m." => Some(Gender::M),
            "f." => Some(Gender::F),
            "n." | "nt." => Some(Gender::N),
            _ => None,
        }
    }

    /// The abbreviation as written in entries, `None` for no gender.
    pub fn tag(self) -> Option<&'static str> {
        match self {
            Gender::M => Some("m."),
            Gender::F => Some("f."),
            Gender::N => Some("n."),
            Gender::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Headword {
    pub group_label: Option<String>,
    pub lemma: String,
    pub gloss: Option<String>,
    /// Grammatical tags such as `tr.` or `m.`.
    pub tags: Vec<String>,
    /// Text-source sigla (`RV.`) and parenthesised remarks, verbatim.
    pub sigla: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReflexRecord {
    pub language_id: String,
    pub lemma: String,
    pub gender: Gender,
    pub gloss: Option<String>,
    pub group_label: Option<String>,
    pub tags: Vec<String>,
    /// Parenthesised or bracketed remarks attached to this lemma, verbatim.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParsedEntry {
    pub entry_number: String,
    pub headwords: Vec<Headword>,
    pub etymology_note: Option<String>,
    pub reflexes: Vec<ReflexRecord>,
    /// Cross-reference clauses and stray bracketed remarks, verbatim.
    pub notes: Vec<String>,
    /// Number of `;`-separated clauses in the body.
    pub clause_count: usize,
}

impl ParsedEntry {
    /// Group label of a headword with the unnumbered first headword counted
    /// as group "1" whenever the entry has numbered groups.
    pub fn effective_label(&self, index: usize) -> Option<String> {
        let hw = self.headwords.get(index)?;
        match &hw.group_label {
            Some(l) => Some(l.clone()),
            None if index == 0 && self.has_groups() => Some("1".to_owned()),
            None => None,
        }
    }

    pub fn has_groups(&self) -> bool {
        self.headwords.iter().any(|h| h.group_label.is_some())
            || self.reflexes.iter().any(|r| r.group_label.is_some())
    }
}

/// Offsets are byte offsets into the NFC form of the entry text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntryError {
    #[error("unknown abbreviation {token:?} at byte {offset}")]
    UnknownAbbreviation { offset: usize, token: String },
    #[error("no headword at byte {offset}")]
    NoHeadword { offset: usize },
    #[error("unbalanced {delimiter:?} at byte {offset}")]
    Unbalanced { offset: usize, delimiter: char },
    #[error("entry does not start with an entry number")]
    MissingNumber,
    #[error("unexpected {token:?} at byte {offset}")]
    UnexpectedToken { offset: usize, token: String },
    #[error("group {label:?} at byte {offset} matches no headword group")]
    DanglingGroup { offset: usize, label: String },
}

impl EntryError {
    /// Short kebab-case name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            EntryError::UnknownAbbreviation { .. } => "unknown-abbreviation",
            EntryError::NoHeadword { .. } => "no-headword",
            EntryError::Unbalanced { .. } => "unbalanced-quote-or-bracket",
            EntryError::MissingNumber => "missing-number",
            EntryError::UnexpectedToken { .. } => "unexpected-token",
            EntryError::DanglingGroup { .. } => "dangling-group",
        }
    }
}
