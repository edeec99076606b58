//! Tab-separated exchange files shared with external predictors.
//!
//! `train.tsv` and `test.tsv` hold `cognateset_id, language_tag, source,
//! target`; `pred.tsv` holds the same with `prediction` instead of `target`.
//! Token lists are space-joined. Each file starts with its header line.

use std::io::{Read, Write};

use thiserror::Error;

use super::ReflexExample;

pub const EXAMPLE_HEADER: [&str; 4] = ["cognateset_id", "language_tag", "source", "target"];
pub const PREDICTION_HEADER: [&str; 4] = ["cognateset_id", "language_tag", "source", "prediction"];

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("expected header {expected:?}, found {found:?}")]
    BadHeader { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("token {0:?} contains whitespace and cannot be written")]
    BadToken(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRow {
    pub cognateset_id: String,
    pub language_tag: String,
    pub source_tokens: Vec<String>,
    pub predicted_tokens: Vec<String>,
}

fn join(tokens: &[String]) -> Result<String, ExchangeError> {
    if let Some(t) = tokens.iter().find(|t| t.is_empty() || t.chars().any(char::is_whitespace)) {
        return Err(ExchangeError::BadToken(t.clone()));
    }
    Ok(tokens.join(" "))
}

fn split(field: &str) -> Vec<String> {
    field.split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

fn write_rows<W: Write>(w: W, header: [&str; 4], rows: impl Iterator<Item = Result<[String; 4], ExchangeError>>) -> Result<(), ExchangeError> {
    let mut out = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(w);
    let wrap = |e: csv::Error| ExchangeError::Io(e.into());
    out.write_record(header).map_err(wrap)?;
    for row in rows {
        let row = row?;
        if let Some(c) = row[..2].iter().find(|c| c.contains(['\t', '\n', '\r'])) {
            return Err(ExchangeError::BadToken(c.clone()));
        }
        out.write_record(&row).map_err(wrap)?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows<R: Read>(r: R, header: [&str; 4]) -> Result<Vec<[String; 4]>, ExchangeError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .has_headers(false)
        .flexible(true)
        .from_reader(r);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => ExchangeError::Io(e.into()),
            _ => ExchangeError::Row { line: i as u64 + 1, message: e.to_string() },
        })?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 {
            if rec.iter().ne(header.iter().copied()) {
                return Err(ExchangeError::BadHeader {
                    expected: header.join("\t"),
                    found: rec.iter().collect::<Vec<_>>().join("\t"),
                });
            }
            continue;
        }
        if rec.len() != 4 {
            return Err(ExchangeError::Row { line, message: format!("expected 4 columns, found {}", rec.len()) });
        }
        rows.push([rec[0].to_owned(), rec[1].to_owned(), rec[2].to_owned(), rec[3].to_owned()]);
    }
    if rows.is_empty() && rdr.position().line() <= 1 && rdr.position().byte() == 0 {
        return Err(ExchangeError::BadHeader { expected: header.join("\t"), found: String::new() });
    }
    Ok(rows)
}

pub fn write_examples<W: Write>(w: W, examples: &[ReflexExample]) -> Result<(), ExchangeError> {
    write_rows(
        w,
        EXAMPLE_HEADER,
        examples.iter().map(|e| {
            Ok([
                e.cognateset_id.clone(),
                e.language_tag.clone(),
                join(&e.source_tokens)?,
                join(&e.target_tokens)?,
            ])
        }),
    )
}

pub fn read_examples<R: Read>(r: R) -> Result<Vec<ReflexExample>, ExchangeError> {
    Ok(read_rows(r, EXAMPLE_HEADER)?
        .into_iter()
        .map(|[c, l, s, t]| ReflexExample {
            cognateset_id: c,
            language_tag: l,
            source_tokens: split(&s),
            target_tokens: split(&t),
        })
        .collect())
}

pub fn write_predictions<W: Write>(w: W, rows: &[PredictionRow]) -> Result<(), ExchangeError> {
    write_rows(
        w,
        PREDICTION_HEADER,
        rows.iter().map(|p| {
            Ok([
                p.cognateset_id.clone(),
                p.language_tag.clone(),
                join(&p.source_tokens)?,
                // an empty prediction is legal: it is what a failed model emits
                if p.predicted_tokens.is_empty() { String::new() } else { join(&p.predicted_tokens)? },
            ])
        }),
    )
}

pub fn read_predictions<R: Read>(r: R) -> Result<Vec<PredictionRow>, ExchangeError> {
    Ok(read_rows(r, PREDICTION_HEADER)?
        .into_iter()
        .map(|[c, l, s, p]| PredictionRow {
            cognateset_id: c,
            language_tag: l,
            source_tokens: split(&s),
            predicted_tokens: split(&p),
        })
        .collect())
}
