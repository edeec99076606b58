//! The `jambu` command line. Exit codes: 0 success, 1 data or validation
//! failure, 2 usage error. Data goes to stdout, diagnostics to stderr.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cldf::{load_wordlist, read_languages_csv, write_wordlist};
use crate::entry::{entry_to_records, parse_entry, split_entries, AbbreviationTable};
use crate::model::{Database, Language};
use crate::orthonorm::{conversion_report, load_profile, normalize};
use crate::reflex::{
    clade_path, evaluate, extract_examples, read_examples, read_predictions, score, split, write_examples,
    write_predictions, IdentityPredictor, PredictionRow, SplitConfig, SplitUnit,
};
use crate::service::{router, serve, ServiceConfig};
use crate::stats::dataset_stats;

#[derive(Debug, Parser)]
#[command(name = "jambu", version, about = "Build, check and serve cognate databases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a CLDF dataset for integrity violations
    Validate {
        dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Per-family counts of languages, cognate sets and lemmata
    Stats {
        dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Parse dictionary entries (one per blank-line-separated block) into a CLDF dataset
    ParseEntries(ParseEntriesArgs),
    /// Rewrite one CSV column through an orthography profile
    Normalize(NormalizeArgs),
    /// Reflex prediction dataset and scoring
    #[command(subcommand)]
    Reflex(ReflexCommand),
    /// Serve the HTTP API over a dataset
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct ParseEntriesArgs {
    file: PathBuf,
    /// CSV of `abbrev,language_id`; one-column rows are ignored sigla
    #[arg(long)]
    abbrev: PathBuf,
    /// Language id given to headwords
    #[arg(long)]
    ancestor: String,
    /// languages.csv to include in the output
    #[arg(long)]
    languages: Option<PathBuf>,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct NormalizeArgs {
    #[arg(long)]
    profile: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    col: String,
    /// Output CSV; stdout when absent
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Print the conversion report
    #[arg(long)]
    report: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum ReflexCommand {
    /// Extract examples, split them and write train.tsv / test.tsv
    Prep(PrepArgs),
    /// Write the identity baseline's predictions for a test file
    Identity {
        #[arg(long)]
        test: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Score pred.tsv against test.tsv
    Eval {
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct PrepArgs {
    dir: PathBuf,
    #[arg(long)]
    ancestor: String,
    /// Clade path prefix, steps separated by ';'
    #[arg(long)]
    clade: String,
    /// Phoneme inventory profile
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "form")]
    unit: SplitUnit,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(env = "JAMBU_DATA")]
    dir: PathBuf,
    #[arg(long, env = "JAMBU_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "JAMBU_HOST", default_value = "127.0.0.1")]
    host: String,
    /// Origin allowed by CORS, or `*`
    #[arg(long, env = "JAMBU_CORS_ORIGIN")]
    cors_origin: Option<String>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn existing_dir(p: &Path) -> Result<()> {
    if p.is_dir() {
        Ok(())
    } else {
        Err(usage(format!("{} is not a directory", p.display())))
    }
}

fn existing_file(p: &Path) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{} does not exist", p.display())))
    }
}

fn load(dir: &Path) -> Result<Database> {
    existing_dir(dir)?;
    load_wordlist(dir).with_context(|| format!("cannot load {}", dir.display()))
}

fn print_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

pub fn run() -> std::process::ExitCode {
    let code = run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::ExitCode::from(code)
}

/// Runs one command line, writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cmd {
        Command::Validate { dir, json } => {
            let report = load(&dir)?.validate();
            if json {
                print_json(out, &report)?;
            } else {
                for v in &report.violations {
                    writeln!(out, "{v}")?;
                }
                let n = report.len();
                writeln!(out, "{n} violation{}", if n == 1 { "" } else { "s" })?;
            }
            Ok(u8::from(!report.is_empty()))
        }
        Command::Stats { dir, json } => {
            let stats = dataset_stats(&load(&dir)?);
            if json {
                print_json(out, &stats)?;
            } else {
                writeln!(out, "{stats}")?;
            }
            Ok(0)
        }
        Command::ParseEntries(a) => parse_entries(a, out, err),
        Command::Normalize(a) => normalize_cmd(a, out, err),
        Command::Reflex(ReflexCommand::Prep(a)) => reflex_prep(a, out),
        Command::Reflex(ReflexCommand::Identity { test, out: path }) => {
            existing_file(&test)?;
            let examples = read_examples(fs::File::open(&test)?)
                .with_context(|| format!("cannot read {}", test.display()))?;
            let (_, preds) = evaluate(&IdentityPredictor, &examples)?;
            let rows: Vec<PredictionRow> = examples
                .into_iter()
                .zip(preds)
                .map(|(e, p)| PredictionRow {
                    cognateset_id: e.cognateset_id,
                    language_tag: e.language_tag,
                    source_tokens: e.source_tokens,
                    predicted_tokens: p,
                })
                .collect();
            write_predictions(fs::File::create(&path)?, &rows)?;
            writeln!(out, "wrote {} predictions to {}", rows.len(), path.display())?;
            Ok(0)
        }
        Command::Reflex(ReflexCommand::Eval { test, pred, json }) => {
            existing_file(&test)?;
            existing_file(&pred)?;
            let examples = read_examples(fs::File::open(&test)?)
                .with_context(|| format!("cannot read {}", test.display()))?;
            let preds = read_predictions(fs::File::open(&pred)?)
                .with_context(|| format!("cannot read {}", pred.display()))?;
            if examples.len() != preds.len() {
                return Err(usage(format!(
                    "{} has {} rows but {} has {}",
                    pred.display(),
                    preds.len(),
                    test.display(),
                    examples.len()
                )));
            }
            if let Some((i, _)) = examples
                .iter()
                .zip(&preds)
                .enumerate()
                .find(|(_, (e, p))| e.cognateset_id != p.cognateset_id || e.language_tag != p.language_tag)
            {
                return Err(usage(format!("row {} of the two files describes different examples", i + 1)));
            }
            let hyps: Vec<Vec<String>> = preds.into_iter().map(|p| p.predicted_tokens).collect();
            let report = score(&examples, &hyps)?;
            if json {
                print_json(out, &report)?;
            } else {
                writeln!(out, "{report}")?;
            }
            Ok(0)
        }
        Command::Serve(a) => serve_cmd(a, err),
    }
}

#[derive(Serialize)]
struct EntryFailure {
    entry: String,
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct ParseSummary {
    cognate_sets: usize,
    forms: usize,
    failures: Vec<EntryFailure>,
}

fn parse_entries(a: ParseEntriesArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    existing_file(&a.file)?;
    existing_file(&a.abbrev)?;
    let abbrevs = AbbreviationTable::load(&a.abbrev)?;
    let text = fs::read_to_string(&a.file).with_context(|| format!("cannot read {}", a.file.display()))?;

    let mut sets = Vec::new();
    let mut forms = Vec::new();
    let mut seen = BTreeSet::new();
    let mut failures = Vec::new();
    for (i, block) in split_entries(&text).into_iter().enumerate() {
        let label = block
            .split_whitespace()
            .next()
            .filter(|w| w.starts_with(|c: char| c.is_ascii_digit()))
            .map_or_else(|| format!("#{}", i + 1), str::to_owned);
        match parse_entry(block, &abbrevs) {
            Ok(e) if !seen.insert(e.entry_number.clone()) => failures.push(EntryFailure {
                entry: label,
                kind: "duplicate-entry",
                message: format!("entry {} appears twice", e.entry_number),
            }),
            Ok(e) => {
                let (set, fs) = entry_to_records(&e, &a.ancestor);
                sets.push(set);
                forms.extend(fs);
            }
            Err(e) => failures.push(EntryFailure { entry: label, kind: e.kind(), message: e.to_string() }),
        }
    }

    let languages: Vec<Language> = match &a.languages {
        Some(p) => {
            existing_file(p)?;
            read_languages_csv(p)?
        }
        None => {
            let ids: BTreeSet<&str> = forms.iter().map(|f| f.language_id.as_str()).collect();
            ids.into_iter()
                .map(|id| Language { id: id.to_owned(), name: id.to_owned(), ..Language::default() })
                .collect()
        }
    };
    let db = Database::new(forms, sets, languages, Vec::new());
    write_wordlist(&db, &a.out)?;

    for f in &failures {
        writeln!(err, "entry {}: {}: {}", f.entry, f.kind, f.message)?;
    }
    let summary = ParseSummary {
        cognate_sets: db.cognatesets().len(),
        forms: db.forms().len(),
        failures,
    };
    if a.json {
        print_json(out, &summary)?;
    } else {
        writeln!(
            out,
            "wrote {} cognate sets, {} forms to {}; {} failed entries",
            summary.cognate_sets,
            summary.forms,
            a.out.display(),
            summary.failures.len()
        )?;
    }
    Ok(u8::from(!summary.failures.is_empty()))
}

fn normalize_cmd(a: NormalizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    existing_file(&a.profile)?;
    existing_file(&a.input)?;
    let profile = load_profile(&a.profile)?;
    let mut rdr = csv::Reader::from_path(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let header = rdr.headers()?.clone();
    let col = header
        .iter()
        .position(|h| h == a.col)
        .with_context(|| format!("{} has no column {:?}", a.input.display(), a.col))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?);
    }
    let values: Vec<&str> = rows.iter().map(|r| r.get(col).unwrap_or("")).collect();
    let report = conversion_report(&profile, &values);

    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&header)?;
        for r in &rows {
            let rec: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(i, v)| if i == col { normalize(&profile, v).0 } else { v.to_owned() })
                .collect();
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    // the report shares stdout only when the CSV goes to a file
    let report_to: &mut dyn Write = match &a.out {
        Some(p) => {
            fs::write(p, &buf).with_context(|| format!("cannot write {}", p.display()))?;
            out
        }
        None => {
            out.write_all(&buf)?;
            err
        }
    };
    if a.report {
        if a.json {
            print_json(report_to, &report)?;
        } else {
            writeln!(report_to, "{report}")?;
            for (c, n) in &report.histogram {
                writeln!(report_to, "U+{:04X}\t{c}\t{n}", *c as u32)?;
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct PrepSummary {
    examples: usize,
    skipped: usize,
    train: usize,
    test: usize,
}

fn reflex_prep(a: PrepArgs, out: &mut dyn Write) -> Result<u8> {
    existing_file(&a.profile)?;
    if !(a.fraction > 0.0 && a.fraction < 1.0) {
        return Err(usage(format!("--fraction must be in (0, 1), got {}", a.fraction)));
    }
    let db = load(&a.dir)?;
    let profile = load_profile(&a.profile)?;
    let ex = extract_examples(&db, &a.ancestor, &clade_path(&a.clade), &profile)?;
    for s in &ex.skipped {
        log::warn!("skipped form {}: untokenizable {:?}", s.form_id, s.chars);
    }
    let config = SplitConfig { train_fraction: a.fraction, seed: a.seed, unit: a.unit };
    let (train, test) = split(&ex.examples, &config)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    write_examples(fs::File::create(a.out.join("train.tsv"))?, &train)?;
    write_examples(fs::File::create(a.out.join("test.tsv"))?, &test)?;
    let summary = PrepSummary {
        examples: ex.examples.len(),
        skipped: ex.skipped.len(),
        train: train.len(),
        test: test.len(),
    };
    if a.json {
        print_json(out, &summary)?;
    } else {
        writeln!(
            out,
            "examples {} (skipped {} forms)\ntrain {}\ntest {}",
            summary.examples, summary.skipped, summary.train, summary.test
        )?;
    }
    Ok(0)
}

fn serve_cmd(a: ServeArgs, err: &mut dyn Write) -> Result<u8> {
    let db = Arc::new(load(&a.dir)?);
    let app = router(db, &ServiceConfig { cors_origin: a.cors_origin });
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let addr = format!("{}:{}", a.host, a.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        writeln!(err, "listening on http://{}", listener.local_addr()?)?;
        err.flush()?;
        serve(listener, app).await?;
        Ok(0)
    })
}
