use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::Database;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DuplicateFormId,
    DuplicateCognatesetId,
    DuplicateLanguageId,
    DuplicateSourceKey,
    DanglingLanguage,
    DanglingCognateset,
    EmptyForm,
    EmptyHeadword,
    EmptyClade,
    CoordinateOutOfRange,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DuplicateFormId => "duplicate-form-id",
            Self::DuplicateCognatesetId => "duplicate-cognateset-id",
            Self::DuplicateLanguageId => "duplicate-language-id",
            Self::DuplicateSourceKey => "duplicate-source-key",
            Self::DanglingLanguage => "dangling-language",
            Self::DanglingCognateset => "dangling-cognateset",
            Self::EmptyForm => "empty-form",
            Self::EmptyHeadword => "empty-headword",
            Self::EmptyClade => "empty-clade",
            Self::CoordinateOutOfRange => "coordinate-out-of-range",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub id: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.kind, self.id, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

impl Database {
    /// Checks every schema invariant. Violations are data; the report is
    /// sorted by offending id, then kind, then message.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let mut push = |kind, id: &str, message: String| {
            out.push(Violation {
                kind,
                id: id.to_owned(),
                message,
            })
        };

        let mut seen = HashSet::new();
        for l in &self.languages {
            if !seen.insert(l.id.as_str()) {
                push(ViolationKind::DuplicateLanguageId, &l.id, "language id occurs more than once".into());
            }
            if l.clade.iter().all(|c| c.is_empty()) {
                push(ViolationKind::EmptyClade, &l.id, format!("language {:?} has no clade", l.name));
            }
            if let Some(lat) = l.latitude {
                if !(-90.0..=90.0).contains(&lat) {
                    push(ViolationKind::CoordinateOutOfRange, &l.id, format!("latitude {lat} outside [-90, 90]"));
                }
            }
            if let Some(lon) = l.longitude {
                if !(-180.0..=180.0).contains(&lon) {
                    push(ViolationKind::CoordinateOutOfRange, &l.id, format!("longitude {lon} outside [-180, 180]"));
                }
            }
        }

        let mut seen = HashSet::new();
        for c in &self.cognatesets {
            if !seen.insert(c.id.as_str()) {
                push(ViolationKind::DuplicateCognatesetId, &c.id, "cognate set id occurs more than once".into());
            }
            if c.headword.is_empty() {
                push(ViolationKind::EmptyHeadword, &c.id, "cognate set has no headword".into());
            }
        }

        let mut seen = HashSet::new();
        for f in &self.forms {
            if !seen.insert(f.id.as_str()) {
                push(ViolationKind::DuplicateFormId, &f.id, "form id occurs more than once".into());
            }
            if self.language(&f.language_id).is_none() {
                push(ViolationKind::DanglingLanguage, &f.id, format!("language {:?} does not exist", f.language_id));
            }
            if self.cognateset(&f.cognateset_id).is_none() {
                push(ViolationKind::DanglingCognateset, &f.id, format!("cognate set {:?} does not exist", f.cognateset_id));
            }
            if f.form.is_empty() {
                push(ViolationKind::EmptyForm, &f.id, "form is empty".into());
            }
        }

        let mut seen = HashSet::new();
        for s in &self.sources {
            if !seen.insert(s.bibkey.as_str()) {
                push(ViolationKind::DuplicateSourceKey, &s.bibkey, "bibkey occurs more than once".into());
            }
        }

        out.sort_by(|a, b| {
            (a.id.as_str(), a.kind, a.message.as_str()).cmp(&(b.id.as_str(), b.kind, b.message.as_str()))
        });
        ValidationReport { violations: out }
    }
}
