//! `Wordlist-metadata.json`: which file holds which table, and what role each
//! column plays.
//!
//! The format is the CSVW subset used by CLDF datasets. A column's role is
//! taken, in order, from an explicit `"jambu:role"` key, from its CLDF
//! `propertyUrl` term, or from its conventional column name.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::CldfError;

pub const METADATA_FILE: &str = "Wordlist-metadata.json";
const CLDF_TERMS: &str = "http://cldf.clld.org/v1.0/terms.rdf#";


/// One written table: its kind and (column name, role) pairs in order.
pub(crate) type TableLayout = (TableKind, Vec<(String, Option<Role>)>);
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    FormId,
    LanguageId,
    CognatesetId,
    NormalizedForm,
    Gloss,
    Native,
    Ipa,
    Original,
    SubsetId,
    Notes,
    SourceRefs,
    Headword,
    Description,
    LanguageName,
    Clade,
    Latitude,
    Longitude,
}

impl Role {
    pub const ALL: [Role; 17] = [
        Role::FormId,
        Role::LanguageId,
        Role::CognatesetId,
        Role::NormalizedForm,
        Role::Gloss,
        Role::Native,
        Role::Ipa,
        Role::Original,
        Role::SubsetId,
        Role::Notes,
        Role::SourceRefs,
        Role::Headword,
        Role::Description,
        Role::LanguageName,
        Role::Clade,
        Role::Latitude,
        Role::Longitude,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::FormId => "form-id",
            Role::LanguageId => "language-id",
            Role::CognatesetId => "cognateset-id",
            Role::NormalizedForm => "normalized-form",
            Role::Gloss => "gloss",
            Role::Native => "native",
            Role::Ipa => "ipa",
            Role::Original => "original",
            Role::SubsetId => "subset-id",
            Role::Notes => "notes",
            Role::SourceRefs => "source-refs",
            Role::Headword => "headword",
            Role::Description => "description",
            Role::LanguageName => "language-name",
            Role::Clade => "clade",
            Role::Latitude => "latitude",
            Role::Longitude => "longitude",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown column role {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableKind {
    Forms,
    Parameters,
    Cognates,
    Languages,
}

impl TableKind {
    pub const ALL: [TableKind; 4] = [
        TableKind::Forms,
        TableKind::Parameters,
        TableKind::Cognates,
        TableKind::Languages,
    ];

    pub fn default_file(self) -> &'static str {
        match self {
            TableKind::Forms => "forms.csv",
            TableKind::Parameters => "parameters.csv",
            TableKind::Cognates => "cognates.csv",
            TableKind::Languages => "languages.csv",
        }
    }

    fn component(self) -> &'static str {
        match self {
            TableKind::Forms => "FormTable",
            TableKind::Parameters => "ParameterTable",
            TableKind::Cognates => "CognatesetTable",
            TableKind::Languages => "LanguageTable",
        }
    }

    fn from_conforms_to(uri: &str) -> Option<Self> {
        let term = uri.rsplit('#').next().unwrap_or(uri);
        match term {
            "FormTable" => Some(TableKind::Forms),
            "ParameterTable" => Some(TableKind::Parameters),
            "CognatesetTable" | "CognateTable" => Some(TableKind::Cognates),
            "LanguageTable" => Some(TableKind::Languages),
            _ => None,
        }
    }

    fn from_file(url: &str) -> Option<Self> {
        TableKind::ALL.into_iter().find(|k| k.default_file() == url)
    }

    /// Roles that must be mapped for the table to be usable.
    pub fn required(self) -> &'static [Role] {
        match self {
            TableKind::Forms => &[
                Role::FormId,
                Role::LanguageId,
                Role::CognatesetId,
                Role::NormalizedForm,
            ],
            TableKind::Parameters => &[Role::CognatesetId, Role::Headword],
            TableKind::Cognates => &[Role::CognatesetId],
            TableKind::Languages => &[Role::LanguageId, Role::LanguageName],
        }
    }

    /// Roles a column in this table may carry.
    fn allowed(self) -> &'static [Role] {
        match self {
            TableKind::Forms => &[
                Role::FormId,
                Role::LanguageId,
                Role::CognatesetId,
                Role::NormalizedForm,
                Role::Gloss,
                Role::Native,
                Role::Ipa,
                Role::Original,
                Role::SubsetId,
                Role::Notes,
                Role::SourceRefs,
            ],
            TableKind::Parameters => &[
                Role::CognatesetId,
                Role::Headword,
                Role::Description,
                Role::Notes,
            ],
            TableKind::Cognates => &[Role::CognatesetId, Role::Notes, Role::Description, Role::Headword],
            TableKind::Languages => &[
                Role::LanguageId,
                Role::LanguageName,
                Role::Clade,
                Role::Latitude,
                Role::Longitude,
            ],
        }
    }

    fn role_for_term(self, term: &str) -> Option<Role> {
        use Role::*;
        let role = match (self, term) {
            (TableKind::Forms, "id") => FormId,
            (TableKind::Forms, "languageReference") => LanguageId,
            (TableKind::Forms, "parameterReference" | "cognatesetReference") => CognatesetId,
            (TableKind::Forms, "form") => NormalizedForm,
            (TableKind::Forms, "value") => Original,
            (TableKind::Forms, "source") => SourceRefs,
            (TableKind::Forms, "comment") => Notes,
            (TableKind::Parameters | TableKind::Cognates, "id") => CognatesetId,
            (TableKind::Parameters | TableKind::Cognates, "name") => Headword,
            (TableKind::Parameters, "description") => Description,
            (TableKind::Parameters | TableKind::Cognates, "comment") => Notes,
            (TableKind::Cognates, "description") => Notes,
            (TableKind::Languages, "id") => LanguageId,
            (TableKind::Languages, "name") => LanguageName,
            (TableKind::Languages, "latitude") => Latitude,
            (TableKind::Languages, "longitude") => Longitude,
            _ => return None,
        };
        Some(role)
    }

    fn role_for_name(self, name: &str) -> Option<Role> {
        use Role::*;
        let name = name.to_ascii_lowercase();
        let role = match (self, name.as_str()) {
            (TableKind::Forms, "id") => FormId,
            (TableKind::Forms, "language_id") => LanguageId,
            (TableKind::Forms, "cognateset_id" | "parameter_id") => CognatesetId,
            (TableKind::Forms, "form") => NormalizedForm,
            (TableKind::Forms, "gloss") => Gloss,
            (TableKind::Forms, "native" | "native_script") => Native,
            (TableKind::Forms, "ipa" | "phonemic") => Ipa,
            (TableKind::Forms, "original" | "value") => Original,
            (TableKind::Forms, "subset_id" | "subset") => SubsetId,
            (TableKind::Forms, "notes" | "comment") => Notes,
            (TableKind::Forms, "source") => SourceRefs,
            (TableKind::Parameters | TableKind::Cognates, "id" | "cognateset_id") => CognatesetId,
            (TableKind::Parameters, "name" | "headword") => Headword,
            (TableKind::Parameters, "description") => Description,
            (TableKind::Parameters | TableKind::Cognates, "notes" | "comment") => Notes,
            (TableKind::Languages, "id") => LanguageId,
            (TableKind::Languages, "name") => LanguageName,
            (TableKind::Languages, "clade") => Clade,
            (TableKind::Languages, "latitude") => Latitude,
            (TableKind::Languages, "longitude") => Longitude,
            _ => return None,
        };
        Some(role)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMapping {
    pub name: String,
    pub role: Option<Role>,
    /// Separator for multi-valued cells (`clade`, `source-refs`).
    pub separator: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableDescriptor {
    pub kind: TableKind,
    pub file: String,
    /// Columns declared in the metadata, in declaration order. Columns found
    /// in the CSV header but not declared are mapped by name at load time.
    pub columns: Vec<ColumnMapping>,
    pub delimiter: u8,
    pub quote: u8,
}

impl TableDescriptor {
    pub fn default_for(kind: TableKind) -> Self {
        Self {
            kind,
            file: kind.default_file().to_owned(),
            columns: Vec::new(),
            delimiter: b',',
            quote: b'"',
        }
    }

    /// Maps a CSV header onto roles. Each role ends up on at most one column.
    pub fn resolve(&self, header: &[String]) -> Result<ResolvedColumns, CldfError> {
        let mut roles: Vec<Option<Role>> = vec![None; header.len()];
        let mut separators: Vec<Option<String>> = vec![None; header.len()];
        let mut taken: BTreeMap<Role, usize> = BTreeMap::new();

        for (i, name) in header.iter().enumerate() {
            if let Some(col) = self.columns.iter().find(|c| &c.name == name) {
                separators[i] = col.separator.clone();
                if let Some(role) = col.role {
                    if taken.insert(role, i).is_some() {
                        return Err(CldfError::MalformedMetadata(format!(
                            "{}: role {role} is mapped to more than one column",
                            self.file
                        )));
                    }
                    roles[i] = Some(role);
                }
            }
        }
        // name-based fallback only fills roles nothing claimed explicitly
        for (i, name) in header.iter().enumerate() {
            if roles[i].is_some() || self.columns.iter().any(|c| &c.name == name && c.role.is_some()) {
                continue;
            }
            if let Some(role) = self.kind.role_for_name(name) {
                if let std::collections::btree_map::Entry::Vacant(e) = taken.entry(role) {
                    e.insert(i);
                    roles[i] = Some(role);
                }
            }
        }
        for &role in self.kind.required() {
            if !taken.contains_key(&role) {
                return Err(CldfError::MalformedMetadata(format!(
                    "{}: required role {role} is not mapped to any column",
                    self.file
                )));
            }
        }
        Ok(ResolvedColumns {
            header: header.to_vec(),
            roles,
            separators,
            index: taken,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedColumns {
    pub header: Vec<String>,
    pub roles: Vec<Option<Role>>,
    pub separators: Vec<Option<String>>,
    pub index: BTreeMap<Role, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordlistMetadata {
    pub tables: BTreeMap<TableKind, TableDescriptor>,
    pub sources_file: String,
}

impl Default for WordlistMetadata {
    fn default() -> Self {
        Self {
            tables: TableKind::ALL
                .into_iter()
                .map(|k| (k, TableDescriptor::default_for(k)))
                .collect(),
            sources_file: "sources.bib".to_owned(),
        }
    }
}

#[derive(Deserialize)]
struct RawMetadata {
    #[serde(default)]
    dialect: Option<RawDialect>,
    #[serde(default)]
    tables: Vec<RawTable>,
    #[serde(rename = "dc:source", default)]
    source: Option<String>,
}

#[derive(Deserialize, Clone, Default)]
struct RawDialect {
    delimiter: Option<String>,
    #[serde(rename = "quoteChar")]
    quote_char: Option<String>,
}

#[derive(Deserialize)]
struct RawTable {
    url: String,
    #[serde(rename = "dc:conformsTo", default)]
    conforms_to: Option<String>,
    #[serde(default)]
    dialect: Option<RawDialect>,
    #[serde(rename = "tableSchema", default)]
    schema: Option<RawSchema>,
}

#[derive(Deserialize, Default)]
struct RawSchema {
    #[serde(default)]
    columns: Vec<RawColumn>,
}

#[derive(Deserialize)]
struct RawColumn {
    name: String,
    #[serde(rename = "propertyUrl", default)]
    property_url: Option<String>,
    #[serde(rename = "jambu:role", default)]
    role: Option<String>,
    #[serde(default)]
    separator: Option<String>,
}

fn single_byte(s: &str, what: &str) -> Result<u8, CldfError> {
    match s.as_bytes() {
        [b] => Ok(*b),
        _ => Err(CldfError::MalformedMetadata(format!(
            "{what} must be a single ASCII character, got {s:?}"
        ))),
    }
}

impl WordlistMetadata {
    pub fn parse(json: &str) -> Result<Self, CldfError> {
        let raw: RawMetadata = serde_json::from_str(json)
            .map_err(|e| CldfError::MalformedMetadata(e.to_string()))?;
        let mut meta = WordlistMetadata::default();
        if let Some(src) = raw.source {
            meta.sources_file = src;
        }
        let base = raw.dialect.unwrap_or_default();
        let mut seen = BTreeMap::new();

        for table in raw.tables {
            let kind = table
                .conforms_to
                .as_deref()
                .and_then(TableKind::from_conforms_to)
                .or_else(|| TableKind::from_file(&table.url));
            // tables outside the wordlist model are not our concern
            let Some(kind) = kind else { continue };
            if seen.insert(kind, table.url.clone()).is_some() {
                return Err(CldfError::MalformedMetadata(format!(
                    "more than one table describes {}",
                    kind.default_file()
                )));
            }
            let dialect = table.dialect.unwrap_or_else(|| base.clone());
            let delimiter = dialect
                .delimiter
                .or(base.delimiter.clone())
                .map(|d| single_byte(&d, "delimiter"))
                .transpose()?
                .unwrap_or(b',');
            let quote = dialect
                .quote_char
                .or(base.quote_char.clone())
                .map(|q| single_byte(&q, "quoteChar"))
                .transpose()?
                .unwrap_or(b'"');

            let mut columns = Vec::new();
            for col in table.schema.unwrap_or_default().columns {
                let role = match col.role {
                    Some(r) => Some(r.parse::<Role>().map_err(CldfError::MalformedMetadata)?),
                    None => col
                        .property_url
                        .as_deref()
                        .filter(|u| u.starts_with(CLDF_TERMS))
                        .and_then(|u| kind.role_for_term(&u[CLDF_TERMS.len()..])),
                };
                if let Some(r) = role {
                    if !kind.allowed().contains(&r) {
                        return Err(CldfError::MalformedMetadata(format!(
                            "{}: role {r} is not valid in this table",
                            table.url
                        )));
                    }
                }
                columns.push(ColumnMapping {
                    name: col.name,
                    role,
                    separator: col.separator,
                });
            }
            meta.tables.insert(
                kind,
                TableDescriptor {
                    kind,
                    file: table.url,
                    columns,
                    delimiter,
                    quote,
                },
            );
        }
        Ok(meta)
    }

    pub fn table(&self, kind: TableKind) -> &TableDescriptor {
        &self.tables[&kind]
    }

    /// Metadata describing exactly the layout that `write_wordlist` emits.
    pub(crate) fn written(layouts: &[TableLayout]) -> Value {
        let tables: Vec<Value> = layouts
            .iter()
            .map(|(kind, cols)| {
                let columns: Vec<Value> = cols
                    .iter()
                    .map(|(name, role)| {
                        let mut c = json!({ "name": name, "datatype": "string" });
                        if let Some(r) = role {
                            c["jambu:role"] = json!(r.as_str());
                            if matches!(r, Role::Clade | Role::SourceRefs) {
                                c["separator"] = json!(";");
                            }
                        }
                        c
                    })
                    .collect();
                json!({
                    "url": kind.default_file(),
                    "dc:conformsTo": format!("{CLDF_TERMS}{}", kind.component()),
                    "tableSchema": { "columns": columns },
                })
            })
            .collect();
        json!({
            "@context": "http://www.w3.org/ns/csvw",
            "dc:conformsTo": format!("{CLDF_TERMS}Wordlist"),
            "dc:source": "sources.bib",
            "dialect": { "delimiter": ",", "quoteChar": "\"", "header": true },
            "tables": tables,
        })
    }
}
