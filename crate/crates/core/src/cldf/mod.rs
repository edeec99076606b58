//! CLDF wordlist directories: `Wordlist-metadata.json`, four CSV tables and a
//! BibTeX file.

mod bibtex;
mod metadata;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use thiserror::Error;

use crate::model::{CognateSet, Database, Extra, Form, Language, SourceRef};

pub use bibtex::{parse_bibtex, write_bibtex, BibParse, BibWarning};
pub use metadata::{
    ColumnMapping, ResolvedColumns, Role, TableDescriptor, TableKind, WordlistMetadata,
    METADATA_FILE,
};

#[derive(Debug, Error)]
pub enum CldfError {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("malformed metadata: {0}")]
    MalformedMetadata(String),
    #[error("{file}:{line}: column {column}: {message}")]
    Csv {
        file: String,
        line: u64,
        column: String,
        message: String,
    },
    #[error("{file}: duplicate id {id:?}")]
    DuplicateId { file: String, id: String },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CldfError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            CldfError::MissingFile(path.to_owned())
        } else {
            CldfError::Io {
                path: path.to_owned(),
                source,
            }
        }
    }
}

/// Rows read per table, plus anything the loader chose not to keep.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub rows: BTreeMap<String, usize>,
    pub bib_warnings: Vec<BibWarning>,
}

pub fn load_wordlist(dir: impl AsRef<Path>) -> Result<Database, CldfError> {
    load_wordlist_with_report(dir).map(|(db, _)| db)
}

pub fn load_wordlist_with_report(dir: impl AsRef<Path>) -> Result<(Database, LoadReport), CldfError> {
    let dir = dir.as_ref();
    let meta_path = dir.join(METADATA_FILE);
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| CldfError::io(&meta_path, e))?;
    let meta = WordlistMetadata::parse(&meta_text)?;
    let mut report = LoadReport::default();

    // every file must exist before anything is parsed
    for kind in TableKind::ALL {
        let p = dir.join(&meta.table(kind).file);
        if !p.is_file() {
            return Err(CldfError::MissingFile(p));
        }
    }
    let bib_path = dir.join(&meta.sources_file);
    if !bib_path.is_file() {
        return Err(CldfError::MissingFile(bib_path));
    }

    let forms_t = read_table(dir, meta.table(TableKind::Forms))?;
    let params_t = read_table(dir, meta.table(TableKind::Parameters))?;
    let cognates_t = read_table(dir, meta.table(TableKind::Cognates))?;
    let langs_t = read_table(dir, meta.table(TableKind::Languages))?;
    for t in [&forms_t, &params_t, &cognates_t, &langs_t] {
        report.rows.insert(t.file.clone(), t.rows.len());
    }

    let mut forms = Vec::with_capacity(forms_t.rows.len());
    let mut ids = BTreeSet::new();
    for row in &forms_t.rows {
        let form = Form {
            id: row.get(Role::FormId).to_owned(),
            language_id: row.get(Role::LanguageId).to_owned(),
            cognateset_id: row.get(Role::CognatesetId).to_owned(),
            form: row.get(Role::NormalizedForm).to_owned(),
            gloss: row.get(Role::Gloss).to_owned(),
            native: row.opt(Role::Native),
            ipa: row.opt(Role::Ipa),
            original: row.opt(Role::Original),
            subset_id: row.opt(Role::SubsetId),
            notes: row.opt(Role::Notes),
            source_refs: row
                .multi(Role::SourceRefs)
                .into_iter()
                .map(|r| SourceRef::parse(&r))
                .collect(),
            extra: row.extra(),
        };
        if !ids.insert(form.id.clone()) {
            return Err(CldfError::DuplicateId {
                file: forms_t.file.clone(),
                id: form.id,
            });
        }
        forms.push(form);
    }

    // parameters.csv and cognates.csv are joined on the set id
    let mut sets: BTreeMap<String, CognateSet> = BTreeMap::new();
    for table in [&params_t, &cognates_t] {
        let mut seen = BTreeSet::new();
        for row in &table.rows {
            let id = row.get(Role::CognatesetId).to_owned();
            if !seen.insert(id.clone()) {
                return Err(CldfError::DuplicateId {
                    file: table.file.clone(),
                    id,
                });
            }
            let set = sets.entry(id.clone()).or_insert_with(|| CognateSet {
                id,
                ..Default::default()
            });
            if set.headword.is_empty() {
                set.headword = row.get(Role::Headword).to_owned();
            }
            if set.description.is_none() {
                set.description = row.opt(Role::Description);
            }
            if set.notes.is_none() {
                set.notes = row.opt(Role::Notes);
            }
            for (k, v) in row.extra() {
                set.extra.entry(k).or_insert(v);
            }
        }
    }

    let languages = languages_from(&langs_t)?;

    let bib_text = fs::read_to_string(&bib_path).map_err(|e| CldfError::io(&bib_path, e))?;
    let bib = parse_bibtex(&bib_text);
    for w in &bib.warnings {
        log::warn!("{}:{}: skipped entry: {}", meta.sources_file, w.line, w.message);
    }
    report.rows.insert(meta.sources_file.clone(), bib.sources.len());
    report.bib_warnings = bib.warnings;

    let db = Database::new(forms, sets.into_values().collect(), languages, bib.sources);
    Ok((db, report))
}

fn languages_from(t: &Table) -> Result<Vec<Language>, CldfError> {
    let mut languages = Vec::with_capacity(t.rows.len());
    let mut ids = BTreeSet::new();
    for row in &t.rows {
        let lang = Language {
            id: row.get(Role::LanguageId).to_owned(),
            name: row.get(Role::LanguageName).to_owned(),
            clade: row.multi(Role::Clade),
            latitude: row.float(Role::Latitude)?,
            longitude: row.float(Role::Longitude)?,
            extra: row.extra(),
        };
        if !ids.insert(lang.id.clone()) {
            return Err(CldfError::DuplicateId {
                file: t.file.clone(),
                id: lang.id,
            });
        }
        languages.push(lang);
    }
    Ok(languages)
}

/// Reads a standalone `languages.csv` (columns found by their conventional
/// names, `;`-separated clade).
pub fn read_languages_csv(path: impl AsRef<Path>) -> Result<Vec<Language>, CldfError> {
    let path = path.as_ref();
    let desc = TableDescriptor {
        file: path.display().to_string(),
        ..TableDescriptor::default_for(TableKind::Languages)
    };
    languages_from(&read_table(Path::new(""), &desc)?)
}

struct Table {
    file: String,
    rows: Vec<Row>,
}

struct TableContext {
    file: String,
    columns: ResolvedColumns,
}

struct Row {
    line: u64,
    cells: Vec<String>,
    ctx: Rc<TableContext>,
}

impl Row {
    fn get(&self, role: Role) -> &str {
        self.ctx.columns
            .index
            .get(&role)
            .and_then(|&i| self.cells.get(i))
            .map_or("", String::as_str)
    }

    fn opt(&self, role: Role) -> Option<String> {
        Some(self.get(role)).filter(|s| !s.is_empty()).map(str::to_owned)
    }

    fn multi(&self, role: Role) -> Vec<String> {
        let raw = self.get(role);
        if raw.is_empty() {
            return Vec::new();
        }
        let sep = self
            .ctx
            .columns
            .index
            .get(&role)
            .and_then(|&i| self.ctx.columns.separators[i].as_deref())
            .unwrap_or(";");
        raw.split(sep)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect()
    }

    fn float(&self, role: Role) -> Result<Option<f64>, CldfError> {
        let raw = self.get(role).trim();
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| CldfError::Csv {
                file: self.ctx.file.clone(),
                line: self.line,
                column: self.ctx.columns.header[self.ctx.columns.index[&role]].clone(),
                message: format!("{raw:?} is not a number"),
            })
    }

    fn extra(&self) -> Extra {
        self.ctx.columns
            .roles
            .iter()
            .zip(&self.ctx.columns.header)
            .zip(&self.cells)
            .filter(|((role, _), v)| role.is_none() && !v.is_empty())
            .map(|((_, name), v)| (name.clone(), v.clone()))
            .collect()
    }
}

fn read_table(dir: &Path, desc: &TableDescriptor) -> Result<Table, CldfError> {
    let path = dir.join(&desc.file);
    let bytes = fs::read(&path).map_err(|e| CldfError::io(&path, e))?;
    let bytes = bytes.strip_prefix("\u{feff}".as_bytes()).unwrap_or(&bytes);
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(desc.delimiter)
        .quote(desc.quote)
        .has_headers(true)
        .from_reader(bytes);
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        let column = match e.kind() {
            csv::ErrorKind::Utf8 { err, .. } => format!("#{}", err.field() + 1),
            csv::ErrorKind::UnequalLengths { len, .. } => format!("#{}", len + 1),
            _ => "?".to_owned(),
        };
        CldfError::Csv {
            file: desc.file.clone(),
            line,
            column,
            message: e.to_string(),
        }
    };
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    let ctx = Rc::new(TableContext {
        file: desc.file.clone(),
        columns: desc.resolve(&header)?,
    });
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(Row {
            line: rec.position().map_or(0, |p| p.line()),
            cells: rec.iter().map(str::to_owned).collect(),
            ctx: ctx.clone(),
        });
    }
    Ok(Table {
        file: desc.file.clone(),
        rows,
    })
}

/// Writes `db` as a CLDF directory. Rows come out in id order, extra columns
/// after the fixed ones in name order, so equal databases give equal bytes.
pub fn write_wordlist(db: &Database, dir: impl AsRef<Path>) -> Result<(), CldfError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| CldfError::io(dir, e))?;

    let fixed_forms: [(&str, Role); 11] = [
        ("ID", Role::FormId),
        ("Language_ID", Role::LanguageId),
        ("Cognateset_ID", Role::CognatesetId),
        ("Form", Role::NormalizedForm),
        ("Gloss", Role::Gloss),
        ("Native", Role::Native),
        ("IPA", Role::Ipa),
        ("Original", Role::Original),
        ("Subset_ID", Role::SubsetId),
        ("Notes", Role::Notes),
        ("Source", Role::SourceRefs),
    ];
    let fixed_params = [
        ("ID", Role::CognatesetId),
        ("Name", Role::Headword),
        ("Description", Role::Description),
    ];
    let fixed_cognates = [("ID", Role::CognatesetId), ("Notes", Role::Notes)];
    let fixed_langs = [
        ("ID", Role::LanguageId),
        ("Name", Role::LanguageName),
        ("Clade", Role::Clade),
        ("Latitude", Role::Latitude),
        ("Longitude", Role::Longitude),
    ];

    let form_extra = extra_columns(db.forms().iter().map(|f| &f.extra), &fixed_forms);
    let set_extra = extra_columns(db.cognatesets().iter().map(|c| &c.extra), &fixed_params);
    let lang_extra = extra_columns(db.languages().iter().map(|l| &l.extra), &fixed_langs);

    let opt = |o: &Option<String>| o.clone().unwrap_or_default();

    write_csv(dir, TableKind::Forms, &fixed_forms, &form_extra, db.forms().iter().map(|f| {
        let mut row = vec![
            f.id.clone(),
            f.language_id.clone(),
            f.cognateset_id.clone(),
            f.form.clone(),
            f.gloss.clone(),
            opt(&f.native),
            opt(&f.ipa),
            opt(&f.original),
            opt(&f.subset_id),
            opt(&f.notes),
            f.source_refs.iter().map(SourceRef::render).collect::<Vec<_>>().join(";"),
        ];
        row.extend(form_extra.iter().map(|k| f.extra.get(k).cloned().unwrap_or_default()));
        row
    }))?;
    write_csv(dir, TableKind::Parameters, &fixed_params, &set_extra, db.cognatesets().iter().map(|c| {
        let mut row = vec![c.id.clone(), c.headword.clone(), opt(&c.description)];
        row.extend(set_extra.iter().map(|k| c.extra.get(k).cloned().unwrap_or_default()));
        row
    }))?;
    write_csv(dir, TableKind::Cognates, &fixed_cognates, &[], db.cognatesets().iter().map(|c| {
        vec![c.id.clone(), opt(&c.notes)]
    }))?;
    write_csv(dir, TableKind::Languages, &fixed_langs, &lang_extra, db.languages().iter().map(|l| {
        let mut row = vec![
            l.id.clone(),
            l.name.clone(),
            l.clade.join(";"),
            l.latitude.map(|v| v.to_string()).unwrap_or_default(),
            l.longitude.map(|v| v.to_string()).unwrap_or_default(),
        ];
        row.extend(lang_extra.iter().map(|k| l.extra.get(k).cloned().unwrap_or_default()));
        row
    }))?;

    let bib_path = dir.join("sources.bib");
    fs::write(&bib_path, write_bibtex(db.sources())).map_err(|e| CldfError::io(&bib_path, e))?;

    let layout = |fixed: &[(&str, Role)], extra: &[String]| -> Vec<(String, Option<Role>)> {
        fixed
            .iter()
            .map(|(n, r)| (n.to_string(), Some(*r)))
            .chain(extra.iter().map(|n| (n.clone(), None)))
            .collect()
    };
    let meta = WordlistMetadata::written(&[
        (TableKind::Forms, layout(&fixed_forms, &form_extra)),
        (TableKind::Parameters, layout(&fixed_params, &set_extra)),
        (TableKind::Cognates, layout(&fixed_cognates, &[])),
        (TableKind::Languages, layout(&fixed_langs, &lang_extra)),
    ]);
    let meta_path = dir.join(METADATA_FILE);
    let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    text.push('\n');
    fs::write(&meta_path, text).map_err(|e| CldfError::io(&meta_path, e))
}

fn extra_columns<'a>(bags: impl Iterator<Item = &'a Extra>, fixed: &[(&str, Role)]) -> Vec<String> {
    let mut names = BTreeSet::new();
    for bag in bags {
        names.extend(bag.keys().cloned());
    }
    // an extra column named like a fixed one would be re-read under that role
    let taken: HashMap<String, ()> = fixed.iter().map(|(n, _)| (n.to_ascii_lowercase(), ())).collect();
    names
        .into_iter()
        .filter(|n| !taken.contains_key(&n.to_ascii_lowercase()))
        .collect()
}

fn write_csv(
    dir: &Path,
    kind: TableKind,
    fixed: &[(&str, Role)],
    extra: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), CldfError> {
    let path = dir.join(kind.default_file());
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CldfError::io(&path, e),
        other => CldfError::Io {
            path: path.clone(),
            source: std::io::Error::other(format!("{other:?}")),
        },
    };
    let mut w = csv::WriterBuilder::new()
        .from_path(&path)
        .map_err(io)?;
    let header: Vec<&str> = fixed.iter().map(|(n, _)| *n).chain(extra.iter().map(String::as_str)).collect();
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CldfError::io(&path, e))
}
