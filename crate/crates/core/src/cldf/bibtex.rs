//! Tolerant reader for `sources.bib`.
//!
//! Only what a bibliography of data sources needs: entry type, key and flat
//! `field = value` pairs. `@string` macros are expanded, `@comment` and
//! `@preamble` are skipped. An entry that cannot be read is dropped with a
//! warning and scanning resumes at the next `@`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::model::Source;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibWarning {
    /// 1-based line of the `@` that started the skipped entry.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BibParse {
    pub sources: Vec<Source>,
    pub warnings: Vec<BibWarning>,
}

pub fn parse_bibtex(text: &str) -> BibParse {
    let mut parser = Parser {
        src: text,
        pos: 0,
        macros: HashMap::new(),
    };
    let mut out = BibParse::default();
    while let Some(at) = parser.src[parser.pos..].find('@') {
        let start = parser.pos + at;
        parser.pos = start + 1;
        match parser.entry() {
            Ok(Some(source)) => out.sources.push(source),
            Ok(None) => {}
            Err(message) => {
                out.warnings.push(BibWarning {
                    line: line_of(text, start),
                    message,
                });
                // resume after the failed '@'; pos may have run past the next one
                parser.pos = start + 1;
            }
        }
    }
    out
}

/// Renders sources so that [`parse_bibtex`] reads them back unchanged.
pub fn write_bibtex(sources: &[Source]) -> String {
    let mut out = String::new();
    for s in sources {
        let _ = writeln!(out, "@{}{{{},", s.entry_type, s.bibkey);
        for (k, v) in &s.fields {
            let _ = writeln!(out, "  {k} = {{{v}}},");
        }
        out.push_str("}\n\n");
    }
    out
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    macros: HashMap<String, String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| !c.is_whitespace() && !"{}(),=#\"@".contains(c))
        {
            self.bump();
        }
        self.src[start..self.pos].to_owned()
    }

    fn expect(&mut self, want: char) -> Result<(), String> {
        self.skip_ws();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(format!("expected {want:?}, found {c:?}")),
            None => Err(format!("expected {want:?}, found end of input")),
        }
    }

    /// Content of a `{...}` group whose opening brace was consumed.
    fn braced(&mut self) -> Result<String, String> {
        let start = self.pos;
        let mut depth = 1usize;
        while let Some(c) = self.bump() {
            match c {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(self.src[start..self.pos - 1].to_owned());
                    }
                }
                _ => {}
            }
        }
        Err("unbalanced braces".into())
    }

    fn quoted(&mut self) -> Result<String, String> {
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.bump() {
            match c {
                '{' => depth += 1,
                '}' => depth = depth.saturating_sub(1),
                '"' if depth == 0 => return Ok(self.src[start..self.pos - 1].to_owned()),
                _ => {}
            }
        }
        Err("unterminated quoted value".into())
    }

    fn value(&mut self) -> Result<String, String> {
        let mut out = String::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('{') => {
                    self.bump();
                    out.push_str(&self.braced()?);
                }
                Some('"') => {
                    self.bump();
                    out.push_str(&self.quoted()?);
                }
                Some(_) => {
                    let word = self.ident();
                    if word.is_empty() {
                        return Err(format!("expected a value at byte {}", self.pos));
                    }
                    match self.macros.get(&word.to_lowercase()) {
                        Some(v) => out.push_str(v),
                        None => out.push_str(&word),
                    }
                }
                None => return Err("unexpected end of input in value".into()),
            }
            self.skip_ws();
            if self.peek() == Some('#') {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    /// Parses one `@type{...}` after its `@`. `Ok(None)` for non-entries.
    fn entry(&mut self) -> Result<Option<Source>, String> {
        let entry_type = self.ident().to_lowercase();
        if entry_type.is_empty() {
            return Err("missing entry type after '@'".into());
        }
        self.skip_ws();
        let close = match self.bump() {
            Some('{') => '}',
            Some('(') => ')',
            _ => return Err(format!("@{entry_type} is not followed by '{{' or '('")),
        };
        match entry_type.as_str() {
            "comment" | "preamble" => {
                if close == '}' {
                    self.braced()?;
                } else {
                    self.skip_past(')')?;
                }
                return Ok(None);
            }
            "string" => {
                self.skip_ws();
                let name = self.ident().to_lowercase();
                self.expect('=')?;
                let v = self.value()?;
                self.expect(close)?;
                self.macros.insert(name, v);
                return Ok(None);
            }
            _ => {}
        }

        self.skip_ws();
        let key_start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c != ',' && c != close && !c.is_whitespace())
        {
            self.bump();
        }
        let bibkey = self.src[key_start..self.pos].to_owned();
        if bibkey.is_empty() {
            return Err(format!("@{entry_type} entry has no key"));
        }
        let mut fields = BTreeMap::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(c) if c == close => {
                    self.bump();
                    break;
                }
                Some('@') | None => {
                    return Err(format!("entry {bibkey:?} is not closed"));
                }
                Some(_) => {
                    let name = self.ident().to_lowercase();
                    if name.is_empty() {
                        return Err(format!("malformed field in entry {bibkey:?}"));
                    }
                    self.expect('=')?;
                    let v = self.value()?;
                    fields.insert(name, v);
                }
            }
        }
        Ok(Some(Source {
            bibkey,
            entry_type,
            fields,
        }))
    }

    fn skip_past(&mut self, c: char) -> Result<(), String> {
        match self.src[self.pos..].find(c) {
            Some(i) => {
                self.pos += i + c.len_utf8();
                Ok(())
            }
            None => Err(format!("missing {c:?}")),
        }
    }
}
