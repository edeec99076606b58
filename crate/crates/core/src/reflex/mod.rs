//! Reflex prediction: given an ancestor word and a descendant language,
//! predict the descendant form. This module builds the dataset from a
//! [`Database`], splits it, and scores predictions at the phoneme level.

mod eval;
mod exchange;
pub mod metrics;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Database, Form};
use crate::orthonorm::{segment, OrthoProfile};

pub use eval::{evaluate, score, EvalReport, IdentityPredictor, LanguageScore, PredictError, Predictor};
pub use exchange::{
    read_examples, read_predictions, write_examples, write_predictions, ExchangeError, PredictionRow,
    EXAMPLE_HEADER, PREDICTION_HEADER,
};
pub use metrics::{bleu, ter};

#[derive(Debug, Error)]
pub enum ReflexError {
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("{form:?} cannot be tokenized: no rule for {}", chars_list(.chars))]
    Untokenizable { form: String, chars: Vec<char> },
    #[error("need at least 2 examples to split, got {0}")]
    TooFewExamples(usize),
    #[error("need at least 2 cognate sets to split by set, got {0}")]
    TooFewSets(usize),
    #[error("train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("{hypotheses} hypotheses for {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("no references to score against")]
    EmptyReferences,
}

fn chars_list(chars: &[char]) -> String {
    chars.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexExample {
    pub cognateset_id: String,
    pub source_tokens: Vec<String>,
    pub language_tag: String,
    pub target_tokens: Vec<String>,
}

/// Phoneme tokens of `form`: the graphemes matched by `profile`, whose rules
/// are the phoneme inventory. The reconstruction mark `*` and the stem
/// hyphen `-` are notation and are dropped first; whitespace separates
/// tokens without producing any.
pub fn tokenize_phonemes(profile: &OrthoProfile, form: &str) -> Result<Vec<String>, ReflexError> {
    let cleaned: String = form.chars().filter(|&c| c != '*' && c != '-').collect();
    let seg = segment(profile, &cleaned);
    let mut bad: Vec<char> = Vec::new();
    for f in &seg.failures {
        if !f.ch.is_whitespace() && !bad.contains(&f.ch) {
            bad.push(f.ch);
        }
    }
    if !bad.is_empty() {
        return Err(ReflexError::Untokenizable {
            form: form.to_owned(),
            chars: bad,
        });
    }
    let toks: Vec<String> = seg.tokens.into_iter().map(|t| t.grapheme).collect();
    if toks.is_empty() {
        return Err(ReflexError::Untokenizable {
            form: form.to_owned(),
            chars: Vec::new(),
        });
    }
    Ok(toks)
}

/// A form left out of the dataset because it could not be tokenized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedForm {
    pub form_id: String,
    pub chars: Vec<char>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub examples: Vec<ReflexExample>,
    pub skipped: Vec<SkippedForm>,
}

/// Splits a clade path such as `"Indo-Aryan;Western"` into its steps.
pub fn clade_path(s: &str) -> Vec<String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Pairs the ancestor form of every cognate set with each descendant form in
/// `descendant_clade`. The source is the ancestor form spelled like the set's
/// headword, else the ancestor form with the smallest id; other ancestor
/// variants are not used. Output is sorted by set id, then target form id.
pub fn extract_examples(
    db: &Database,
    ancestor_language_id: &str,
    descendant_clade: &[String],
    profile: &OrthoProfile,
) -> Result<Extraction, ReflexError> {
    if db.language(ancestor_language_id).is_none() {
        return Err(ReflexError::UnknownLanguage(ancestor_language_id.to_owned()));
    }
    let mut out = Extraction::default();
    let skip = |f: &Form, e: ReflexError, out: &mut Extraction| {
        if let ReflexError::Untokenizable { chars, .. } = e {
            out.skipped.push(SkippedForm { form_id: f.id.clone(), chars });
        }
    };
    for set_id in db.referenced_cognateset_ids() {
        let members: Vec<&Form> = db.cognateset_members(set_id).collect();
        let ancestors: Vec<&Form> = members
            .iter()
            .copied()
            .filter(|f| f.language_id == ancestor_language_id)
            .collect();
        let headword = db.cognateset(set_id).map(|s| s.headword.as_str());
        let Some(source) = ancestors
            .iter()
            .find(|f| Some(f.form.as_str()) == headword)
            .or(ancestors.first())
        else {
            continue;
        };
        let source_tokens = match tokenize_phonemes(profile, &source.form) {
            Ok(t) => t,
            Err(e) => {
                skip(source, e, &mut out);
                continue;
            }
        };
        for f in &members {
            if f.language_id == ancestor_language_id
                || !db.language(&f.language_id).is_some_and(|l| l.in_clade(descendant_clade))
            {
                continue;
            }
            match tokenize_phonemes(profile, &f.form) {
                Ok(target_tokens) => out.examples.push(ReflexExample {
                    cognateset_id: set_id.to_owned(),
                    source_tokens: source_tokens.clone(),
                    language_tag: f.language_id.clone(),
                    target_tokens,
                }),
                Err(e) => skip(f, e, &mut out),
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitUnit {
    #[default]
    Form,
    Cognateset,
}

impl std::str::FromStr for SplitUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "form" => Ok(SplitUnit::Form),
            "cognateset" | "set" => Ok(SplitUnit::Cognateset),
            _ => Err(format!("unknown split unit {s:?} (expected form or cognateset)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
    pub unit: SplitUnit,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train_fraction: 0.8,
            seed: 0,
            unit: SplitUnit::Form,
        }
    }
}

/// Seeded train/test split. Both sides keep the input order.
///
/// By form, the train side gets `round(fraction * n)` examples, clamped so
/// neither side is empty. By cognate set, sets are shuffled and added to the
/// train side while they fit that target, so the sizes can miss it by more
/// than one example.
pub fn split(
    examples: &[ReflexExample],
    config: &SplitConfig,
) -> Result<(Vec<ReflexExample>, Vec<ReflexExample>), ReflexError> {
    let f = config.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(ReflexError::InvalidFraction(f));
    }
    let n = examples.len();
    if n < 2 {
        return Err(ReflexError::TooFewExamples(n));
    }
    let target = ((f * n as f64).round() as usize).clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut in_train = vec![false; n];
    match config.unit {
        SplitUnit::Form => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            for &i in &idx[..target] {
                in_train[i] = true;
            }
        }
        SplitUnit::Cognateset => {
            let mut sets: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, e) in examples.iter().enumerate() {
                sets.entry(e.cognateset_id.as_str()).or_default().push(i);
            }
            if sets.len() < 2 {
                return Err(ReflexError::TooFewSets(sets.len()));
            }
            let mut groups: Vec<Vec<usize>> = sets.into_values().collect();
            groups.shuffle(&mut rng);
            let mut size = 0;
            let mut placed = Vec::new();
            for (g, members) in groups.iter().enumerate() {
                if size == 0 || size + members.len() <= target {
                    size += members.len();
                    placed.push(g);
                }
            }
            if placed.len() == groups.len() {
                placed.pop();
            }
            for g in placed {
                for &i in &groups[g] {
                    in_train[i] = true;
                }
            }
        }
    }
    let mut train = Vec::with_capacity(target);
    let mut test = Vec::with_capacity(n - target);
    for (e, t) in examples.iter().zip(in_train) {
        if t {
            train.push(e.clone());
        } else {
            test.push(e.clone());
        }
    }
    Ok((train, test))
}
