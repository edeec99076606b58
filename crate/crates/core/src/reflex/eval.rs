use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::metrics::{BleuStats, TerStats};
use super::{ReflexError, ReflexExample};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct PredictError(pub String);

/// Anything that maps an ancestor token sequence and a target language to a
/// predicted descendant token sequence.
pub trait Predictor: Sync {
    fn predict(&self, source_tokens: &[String], language_tag: &str) -> Result<Vec<String>, PredictError>;
}

impl<F> Predictor for F
where
    F: Fn(&[String], &str) -> Result<Vec<String>, PredictError> + Sync,
{
    fn predict(&self, source_tokens: &[String], language_tag: &str) -> Result<Vec<String>, PredictError> {
        self(source_tokens, language_tag)
    }
}

/// Copies the source. The floor any real model should beat.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPredictor;

impl Predictor for IdentityPredictor {
    fn predict(&self, source_tokens: &[String], _: &str) -> Result<Vec<String>, PredictError> {
        Ok(source_tokens.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageScore {
    pub language_tag: String,
    pub example_count: usize,
    pub bleu: f64,
    pub ter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    /// Pooled over all examples.
    pub bleu: f64,
    pub ter: f64,
    pub example_count: usize,
    /// Examples whose prediction failed and was scored as empty.
    pub failed_predictions: usize,
    /// Sorted by language tag.
    pub per_language: Vec<LanguageScore>,
}

impl std::fmt::Display for EvalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BLEU {:.2}", self.bleu)?;
        writeln!(f, "TER {:.2}", self.ter)?;
        write!(f, "examples {}", self.example_count)?;
        if self.failed_predictions > 0 {
            write!(f, " ({} failed predictions)", self.failed_predictions)?;
        }
        for l in &self.per_language {
            write!(f, "\n{}\t{}\tBLEU {:.2}\tTER {:.2}", l.language_tag, l.example_count, l.bleu, l.ter)?;
        }
        Ok(())
    }
}

/// Scores `predictions` against the targets of `test`, pairing by position.
pub fn score(test: &[ReflexExample], predictions: &[Vec<String>]) -> Result<EvalReport, ReflexError> {
    score_counting(test, predictions, 0)
}

fn score_counting(
    test: &[ReflexExample],
    predictions: &[Vec<String>],
    failed_predictions: usize,
) -> Result<EvalReport, ReflexError> {
    if test.len() != predictions.len() {
        return Err(ReflexError::LengthMismatch {
            hypotheses: predictions.len(),
            references: test.len(),
        });
    }
    if test.is_empty() {
        return Err(ReflexError::EmptyReferences);
    }
    let stats: Vec<(BleuStats, TerStats)> = test
        .par_iter()
        .zip(predictions)
        .map(|(e, p)| {
            (
                BleuStats::sentence(p, &e.target_tokens),
                super::metrics::ter_sentence(p, &e.target_tokens),
            )
        })
        .collect();
    let mut pooled = (BleuStats::default(), TerStats::default());
    let mut by_lang: BTreeMap<&str, (usize, BleuStats, TerStats)> = BTreeMap::new();
    for (e, (b, t)) in test.iter().zip(stats) {
        pooled = (pooled.0 + b, pooled.1 + t);
        let slot = by_lang.entry(e.language_tag.as_str()).or_default();
        *slot = (slot.0 + 1, slot.1 + b, slot.2 + t);
    }
    Ok(EvalReport {
        bleu: pooled.0.score(),
        ter: pooled.1.score(),
        example_count: test.len(),
        failed_predictions,
        per_language: by_lang
            .into_iter()
            .map(|(tag, (n, b, t))| LanguageScore {
                language_tag: tag.to_owned(),
                example_count: n,
                bleu: b.score(),
                ter: t.score(),
            })
            .collect(),
    })
}

/// Runs `predictor` over `test` in parallel and scores the output. Failed
/// predictions count as empty hypotheses. The predictions are returned in
/// test order for dumping to an exchange file.
pub fn evaluate<P: Predictor + ?Sized>(
    predictor: &P,
    test: &[ReflexExample],
) -> Result<(EvalReport, Vec<Vec<String>>), ReflexError> {
    let results: Vec<Result<Vec<String>, PredictError>> = test
        .par_iter()
        .map(|e| predictor.predict(&e.source_tokens, &e.language_tag))
        .collect();
    let mut failed = 0;
    let predictions: Vec<Vec<String>> = results
        .into_iter()
        .map(|r| {
            r.unwrap_or_else(|err| {
                log::warn!("prediction failed: {err}");
                failed += 1;
                Vec::new()
            })
        })
        .collect();
    let report = score_counting(test, &predictions, failed)?;
    Ok((report, predictions))
}
