//! Per-family coverage counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::model::Database;

/// Label used for languages with an empty clade path.
pub const UNCLASSIFIED: &str = "(unclassified)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyStats {
    pub family: String,
    pub languages: usize,
    /// Sets with at least one form from this family.
    pub cognate_sets: usize,
    pub lemmata: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DatasetStats {
    /// Largest families first.
    pub families: Vec<FamilyStats>,
    pub languages: usize,
    /// Sets with at least one form. A set touching several families is
    /// counted once per family above but once here, so the family column
    /// need not add up to this.
    pub cognate_sets: usize,
    pub lemmata: usize,
}

pub fn dataset_stats(db: &Database) -> DatasetStats {
    let mut langs: BTreeMap<&str, usize> = BTreeMap::new();
    let mut family_of: BTreeMap<&str, &str> = BTreeMap::new();
    for l in db.languages() {
        let fam = l.family().unwrap_or(UNCLASSIFIED);
        *langs.entry(fam).or_default() += 1;
        family_of.insert(&l.id, fam);
    }
    let mut sets: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut lemmata: BTreeMap<&str, usize> = BTreeMap::new();
    let mut all_sets = BTreeSet::new();
    for f in db.forms() {
        // forms of an undeclared language fall under the unclassified row
        let fam = family_of.get(f.language_id.as_str()).copied().unwrap_or(UNCLASSIFIED);
        sets.entry(fam).or_default().insert(&f.cognateset_id);
        *lemmata.entry(fam).or_default() += 1;
        all_sets.insert(f.cognateset_id.as_str());
    }
    let names: BTreeSet<&str> = langs.keys().chain(lemmata.keys()).copied().collect();
    let mut families: Vec<FamilyStats> = names
        .into_iter()
        .map(|fam| FamilyStats {
            family: fam.to_owned(),
            languages: langs.get(fam).copied().unwrap_or(0),
            cognate_sets: sets.get(fam).map_or(0, BTreeSet::len),
            lemmata: lemmata.get(fam).copied().unwrap_or(0),
        })
        .collect();
    families.sort_by(|a, b| b.lemmata.cmp(&a.lemmata).then_with(|| a.family.cmp(&b.family)));
    DatasetStats {
        families,
        languages: db.languages().len(),
        cognate_sets: all_sets.len(),
        lemmata: db.forms().len(),
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family\tlanguages\tcognate_sets\tlemmata")?;
        for r in &self.families {
            writeln!(f, "{}\t{}\t{}\t{}", r.family, r.languages, r.cognate_sets, r.lemmata)?;
        }
        write!(f, "total\t{}\t{}\t{}", self.languages, self.cognate_sets, self.lemmata)
    }
}
