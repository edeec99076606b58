use std::collections::BTreeMap;

use super::lexer::{tokenize, Kind, Token};
use super::{AbbreviationTable, EntryError, Gender, Headword, ParsedEntry, ReflexRecord};
use crate::text::nfc;

/// Grammatical abbreviations recognised without an abbreviation table.
pub const GRAMMATICAL_TAGS: &[&str] = &[
    "m.", "f.", "n.", "nt.", "m.f.", "m.n.", "f.n.", "m.f.n.", "adj.", "adv.", "pl.", "sg.",
    "du.", "tr.", "intr.", "caus.", "pp.", "ppp.", "ptcp.", "pres.", "fut.", "aor.", "inf.",
    "absol.", "obl.", "dat.", "gen.", "loc.", "instr.", "acc.", "nom.", "voc.", "abl.", "dem.",
    "pron.", "interj.", "conj.", "postp.", "prep.", "num.", "intens.", "desid.", "denom.",
    "pass.", "indecl.", "dimin.", "compar.", "superl.", "vb.", "sb.", "cpd.", "onom.", "id.",
];

/// Words that open a cross-reference clause, kept verbatim in notes.
pub const NOTE_MARKERS: &[&str] = &["cf.", "Cf.", "ext.", "Ext.", "See", "see", "→"];

/// Splits a file into entries separated by blank lines.
pub fn split_entries(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.trim().is_empty() {
            if let Some(s) = start.take() {
                out.push(text[s..offset].trim());
            }
        } else if start.is_none() {
            start = Some(offset);
        }
        offset += line.len();
    }
    if let Some(s) = start {
        out.push(text[s..].trim());
    }
    out
}

/// Parses one entry. The text is NFC-normalised first; error offsets refer to
/// the normalised text.
pub fn parse_entry(text: &str, abbrevs: &AbbreviationTable) -> Result<ParsedEntry, EntryError> {
    let src = nfc(text);
    let toks = tokenize(&src)?;
    Parser {
        src: &src,
        toks,
        pos: 0,
        abbrevs,
        group_offsets: BTreeMap::new(),
    }
    .entry()
}

enum HeadNext {
    End,
    Same,
    Group(String),
}

#[derive(Default)]
struct Item {
    lemma: String,
    gender: Gender,
    gloss: Option<String>,
    tags: Vec<String>,
    notes: Vec<String>,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    abbrevs: &'a AbbreviationTable,
    group_offsets: BTreeMap<String, usize>,
}

fn group_label(word: &str) -> Option<&str> {
    let digits = word.strip_suffix('.')?;
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())).then_some(digits)
}

fn is_entry_number(word: &str) -> bool {
    word.starts_with(|c: char| c.is_ascii_digit()) && word.chars().all(char::is_alphanumeric)
}

fn is_terminator(word: &str) -> bool {
    !word.is_empty() && word.chars().all(|c| c == '.' || c == '…')
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Token> {
        self.toks.get(self.pos).copied()
    }

    fn word(&self, i: usize) -> Option<&'a str> {
        let t = self.toks.get(i)?;
        (t.kind == Kind::Word).then(|| t.text(self.src))
    }

    fn unexpected(&self, t: Token) -> EntryError {
        EntryError::UnexpectedToken {
            offset: t.start,
            token: t.text(self.src).to_owned(),
        }
    }

    fn end_of_input(&self) -> EntryError {
        EntryError::UnexpectedToken { offset: self.src.len(), token: String::new() }
    }

    /// Longest table key starting at token `i` and ending on a token
    /// boundary, with the index of the token after it.
    fn key_at(&self, i: usize) -> Option<(&'a str, usize)> {
        let t = self.toks.get(i)?;
        if t.kind != Kind::Word {
            return None;
        }
        let rest = &self.src[t.start..];
        for key in self.abbrevs.keys_longest_first() {
            if !rest.starts_with(key) {
                continue;
            }
            let end = t.start + key.len();
            let mut j = i;
            while j < self.toks.len() && self.toks[j].kind == Kind::Word && self.toks[j].end < end {
                j += 1;
            }
            if j < self.toks.len() && self.toks[j].kind == Kind::Word && self.toks[j].end == end {
                return Some((&rest[..key.len()], j + 1));
            }
        }
        None
    }

    fn language_at(&self, i: usize) -> Option<(&'a str, usize)> {
        let (key, next) = self.key_at(i)?;
        self.abbrevs.language(key).map(|_| (key, next))
    }

    fn ignored_at(&self, i: usize) -> Option<(&'a str, usize)> {
        let (key, next) = self.key_at(i)?;
        self.abbrevs.is_ignored(key).then_some((key, next))
    }

    fn note_marker_at(&self, i: usize) -> bool {
        self.word(i).is_some_and(|w| NOTE_MARKERS.contains(&w))
    }

    fn only_terminators_from(&self, i: usize) -> bool {
        i < self.toks.len() && (i..self.toks.len()).all(|j| self.word(j).is_some_and(is_terminator))
    }

    fn lemma_at(&self, i: usize) -> bool {
        match self.word(i) {
            Some(w) => {
                group_label(w).is_none()
                    && !is_terminator(w)
                    && !GRAMMATICAL_TAGS.contains(&w)
                    && !self.note_marker_at(i)
                    && self.key_at(i).is_none()
            }
            None => false,
        }
    }

    fn take_lemma(&mut self) -> String {
        let t = self.toks[self.pos];
        self.pos += 1;
        let mut w = t.text(self.src);
        // a full stop closing the entry is not part of the last lemma
        if self.pos == self.toks.len() && w.len() > 1 {
            w = w.strip_suffix('.').unwrap_or(w);
        }
        w.to_owned()
    }

    fn entry(mut self) -> Result<ParsedEntry, EntryError> {
        if self.toks.is_empty() {
            return Err(EntryError::NoHeadword { offset: 0 });
        }
        let number = self.word(0).filter(|w| is_entry_number(w)).ok_or(EntryError::MissingNumber)?;
        self.pos = 1;
        let mut e = ParsedEntry {
            entry_number: number.to_owned(),
            ..ParsedEntry::default()
        };
        self.head(&mut e)?;
        self.body(&mut e)?;

        let labels: Vec<Option<String>> = (0..e.headwords.len()).map(|i| e.effective_label(i)).collect();
        for r in &e.reflexes {
            if let Some(g) = &r.group_label {
                if !labels.iter().any(|l| l.as_deref() == Some(g)) {
                    return Err(EntryError::DanglingGroup {
                        offset: self.group_offsets.get(g).copied().unwrap_or(0),
                        label: g.clone(),
                    });
                }
            }
        }
        Ok(e)
    }

    fn head(&mut self, e: &mut ParsedEntry) -> Result<(), EntryError> {
        let mut label: Option<String> = None;
        loop {
            let Some(t) = self.peek() else {
                return Err(EntryError::NoHeadword { offset: self.src.len() });
            };
            if !self.lemma_at(self.pos) {
                return Err(if e.headwords.is_empty() {
                    EntryError::NoHeadword { offset: t.start }
                } else {
                    self.unexpected(t)
                });
            }
            let mut hw = Headword {
                group_label: label.clone(),
                lemma: self.take_lemma(),
                ..Headword::default()
            };
            let next = loop {
                let Some(t) = self.peek() else { break HeadNext::End };
                match t.kind {
                    Kind::Gloss => {
                        if hw.gloss.is_some() {
                            return Err(self.unexpected(t));
                        }
                        hw.gloss = Some(t.inner(self.src).to_owned());
                        self.pos += 1;
                    }
                    Kind::Paren => {
                        hw.sigla.push(t.text(self.src).to_owned());
                        self.pos += 1;
                    }
                    Kind::Bracket => {
                        if e.etymology_note.is_none() {
                            e.etymology_note = Some(t.inner(self.src).to_owned());
                        } else {
                            e.notes.push(t.text(self.src).to_owned());
                        }
                        self.pos += 1;
                    }
                    Kind::Comma => {
                        self.pos += 1;
                        break HeadNext::Same;
                    }
                    Kind::Semi => {
                        self.pos += 1;
                        if self.lemma_at(self.pos) {
                            break HeadNext::Same;
                        }
                        break HeadNext::End;
                    }
                    Kind::Word => {
                        let w = t.text(self.src);
                        if self.language_at(self.pos).is_some() || self.note_marker_at(self.pos) {
                            break HeadNext::End;
                        }
                        if let Some(g) = group_label(w) {
                            if self.lemma_at(self.pos + 1) {
                                self.group_offsets.entry(g.to_owned()).or_insert(t.start);
                                self.pos += 1;
                                break HeadNext::Group(g.to_owned());
                            }
                            break HeadNext::End;
                        }
                        if self.only_terminators_from(self.pos) {
                            self.pos = self.toks.len();
                            break HeadNext::End;
                        }
                        if let Some((key, next)) = self.ignored_at(self.pos) {
                            hw.sigla.push(key.to_owned());
                            self.pos = next;
                        } else if GRAMMATICAL_TAGS.contains(&w) {
                            hw.tags.push(w.to_owned());
                            self.pos += 1;
                        } else if w.ends_with('.') {
                            return Err(EntryError::UnknownAbbreviation {
                                offset: t.start,
                                token: w.to_owned(),
                            });
                        } else {
                            return Err(self.unexpected(t));
                        }
                    }
                }
            };
            e.headwords.push(hw);
            match next {
                HeadNext::End => return Ok(()),
                HeadNext::Same => {}
                HeadNext::Group(g) => label = Some(g),
            }
        }
    }

    fn body(&mut self, e: &mut ParsedEntry) -> Result<(), EntryError> {
        let mut group: Option<String> = None;
        while let Some(t) = self.peek() {
            match t.kind {
                Kind::Semi => self.pos += 1,
                Kind::Bracket | Kind::Paren => {
                    e.notes.push(t.text(self.src).to_owned());
                    e.clause_count += 1;
                    self.pos += 1;
                }
                Kind::Gloss | Kind::Comma => return Err(self.unexpected(t)),
                Kind::Word => {
                    let w = t.text(self.src);
                    if let Some(g) = group_label(w) {
                        if self.pos + 1 == self.toks.len() {
                            return Err(self.unexpected(t));
                        }
                        self.group_offsets.entry(g.to_owned()).or_insert(t.start);
                        group = Some(g.to_owned());
                        self.pos += 1;
                        continue;
                    }
                    if self.only_terminators_from(self.pos) {
                        self.pos = self.toks.len();
                        continue;
                    }
                    if self.note_marker_at(self.pos) {
                        let mut end = t.end;
                        while let Some(n) = self.peek().filter(|n| n.kind != Kind::Semi) {
                            end = n.end;
                            self.pos += 1;
                        }
                        e.notes.push(self.src[t.start..end].to_owned());
                        e.clause_count += 1;
                        continue;
                    }
                    let mut langs = Vec::new();
                    while let Some((key, next)) = self.language_at(self.pos) {
                        langs.push(self.abbrevs.language(key).unwrap_or_default().to_owned());
                        self.pos = next;
                    }
                    if langs.is_empty() {
                        if self.key_at(self.pos).is_some() {
                            return Err(self.unexpected(t));
                        }
                        return Err(EntryError::UnknownAbbreviation { offset: t.start, token: w.to_owned() });
                    }
                    let items = self.clause_items()?;
                    e.clause_count += 1;
                    for lang in &langs {
                        for it in &items {
                            e.reflexes.push(ReflexRecord {
                                language_id: lang.clone(),
                                lemma: it.lemma.clone(),
                                gender: it.gender,
                                gloss: it.gloss.clone(),
                                group_label: group.clone(),
                                tags: it.tags.clone(),
                                notes: it.notes.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Comma-separated lemmata of one language clause, with glosses
    /// resolved: a lemma without its own gloss takes the last gloss seen
    /// earlier in the clause.
    fn clause_items(&mut self) -> Result<Vec<Item>, EntryError> {
        let mut items = Vec::new();
        'items: loop {
            match self.peek() {
                None => return Err(self.end_of_input()),
                Some(t) if !self.lemma_at(self.pos) => return Err(self.unexpected(t)),
                Some(_) => {}
            }
            let mut it = Item {
                lemma: self.take_lemma(),
                ..Item::default()
            };
            loop {
                let Some(t) = self.peek() else {
                    items.push(it);
                    break 'items;
                };
                match t.kind {
                    Kind::Gloss => {
                        if it.gloss.is_some() {
                            return Err(self.unexpected(t));
                        }
                        it.gloss = Some(t.inner(self.src).to_owned());
                        self.pos += 1;
                    }
                    Kind::Paren | Kind::Bracket => {
                        it.notes.push(t.text(self.src).to_owned());
                        self.pos += 1;
                    }
                    Kind::Comma => {
                        self.pos += 1;
                        items.push(it);
                        continue 'items;
                    }
                    Kind::Semi => {
                        items.push(it);
                        break 'items;
                    }
                    Kind::Word => {
                        let w = t.text(self.src);
                        if group_label(w).is_some()
                            || self.language_at(self.pos).is_some()
                            || self.note_marker_at(self.pos)
                        {
                            items.push(it);
                            break 'items;
                        }
                        if self.only_terminators_from(self.pos) {
                            self.pos = self.toks.len();
                            items.push(it);
                            break 'items;
                        }
                        if let Some((key, next)) = self.ignored_at(self.pos) {
                            it.notes.push(key.to_owned());
                            self.pos = next;
                            continue;
                        }
                        match Gender::from_tag(w) {
                            Some(g) if it.gender == Gender::None => it.gender = g,
                            _ if GRAMMATICAL_TAGS.contains(&w) => it.tags.push(w.to_owned()),
                            _ if w.ends_with('.') => {
                                return Err(EntryError::UnknownAbbreviation {
                                    offset: t.start,
                                    token: w.to_owned(),
                                })
                            }
                            _ => return Err(self.unexpected(t)),
                        }
                        self.pos += 1;
                    }
                }
            }
        }
        let mut last: Option<String> = None;
        for it in &mut items {
            match &it.gloss {
                Some(g) => last = Some(g.clone()),
                None => it.gloss = last.clone(),
            }
        }
        Ok(items)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const FIG2: &str = "454 ápavartayati tr. 'turns away from' RV. 2. apavṛtta- 'reversed' ŚāṅkhŚr. [√vṛt1] 1. Pk. ōvattēi 'causes to turn back'; S. oṭī f. 'turning over the edge of a cloth and hemming'; 2. G. oṭvũ 'to hem', oṭī f. 'tucked up part of dhotī or sāṛī'";

    pub(crate) fn table() -> AbbreviationTable {
        AbbreviationTable::new(
            [("Pk.", "Pk"), ("S.", "S"), ("G.", "G"), ("Pa.", "Pa"), ("Pash. Deg.", "PashDeg"), ("Pash.", "Pash")],
            ["RV.", "ŚāṅkhŚr.", "lex."],
        )
        .unwrap()
    }

    fn reflex(lang: &str, lemma: &str, gender: Gender, gloss: &str, group: &str) -> ReflexRecord {
        ReflexRecord {
            language_id: lang.into(),
            lemma: lemma.into(),
            gender,
            gloss: Some(gloss.into()),
            group_label: Some(group.into()),
            ..ReflexRecord::default()
        }
    }

    #[test]
    fn fig2_entry() {
        let e = parse_entry(FIG2, &table()).unwrap();
        assert_eq!(e.entry_number, "454");
        assert_eq!(e.headwords.len(), 2);
        assert_eq!(e.headwords[0].lemma, "ápavartayati");
        assert_eq!(e.headwords[0].gloss.as_deref(), Some("turns away from"));
        assert_eq!(e.headwords[0].group_label, None);
        assert_eq!(e.headwords[0].tags, vec!["tr."]);
        assert_eq!(e.headwords[0].sigla, vec!["RV."]);
        assert_eq!(e.headwords[1].lemma, "apavṛtta-");
        assert_eq!(e.headwords[1].gloss.as_deref(), Some("reversed"));
        assert_eq!(e.headwords[1].group_label.as_deref(), Some("2"));
        assert_eq!(e.headwords[1].sigla, vec!["ŚāṅkhŚr."]);
        assert_eq!(e.etymology_note.as_deref(), Some("√vṛt1"));
        assert_eq!(
            e.reflexes,
            vec![
                reflex("Pk", "ōvattēi", Gender::None, "causes to turn back", "1"),
                reflex("S", "oṭī", Gender::F, "turning over the edge of a cloth and hemming", "1"),
                reflex("G", "oṭvũ", Gender::None, "to hem", "2"),
                reflex("G", "oṭī", Gender::F, "tucked up part of dhotī or sāṛī", "2"),
            ]
        );
        assert_eq!(e.clause_count, 3);
        assert!(e.notes.is_empty());
    }

    #[test]
    fn headword_only() {
        let e = parse_entry("1 tword 'gloss'", &table()).unwrap();
        assert_eq!(e.headwords.len(), 1);
        assert_eq!(e.headwords[0].gloss.as_deref(), Some("gloss"));
        assert!(e.reflexes.is_empty());
        assert_eq!(e.clause_count, 0);
    }

    #[test]
    fn unknown_abbreviation_offset() {
        let err = parse_entry("1 tword 'gloss' Q. foo", &table()).unwrap_err();
        assert_eq!(err, EntryError::UnknownAbbreviation { offset: 16, token: "Q.".into() });
        let err = parse_entry("1 tword 'gloss' S. foo; Q. bar", &table()).unwrap_err();
        assert_eq!(err, EntryError::UnknownAbbreviation { offset: 24, token: "Q.".into() });
        assert_eq!(err.kind(), "unknown-abbreviation");
    }

    #[test]
    fn structural_errors() {
        let t = table();
        assert_eq!(parse_entry("", &t).unwrap_err(), EntryError::NoHeadword { offset: 0 });
        assert_eq!(parse_entry("12", &t).unwrap_err(), EntryError::NoHeadword { offset: 2 });
        assert_eq!(parse_entry("12 S. x", &t).unwrap_err(), EntryError::NoHeadword { offset: 3 });
        assert_eq!(parse_entry("ákṣi 'eye'", &t).unwrap_err(), EntryError::MissingNumber);
        assert!(matches!(
            parse_entry("1 a 'open; S. b", &t).unwrap_err(),
            EntryError::Unbalanced { offset: 4, .. }
        ));
        assert!(matches!(
            parse_entry("1 a 'x' 3. S. b", &t).unwrap_err(),
            EntryError::DanglingGroup { offset: 8, .. }
        ));
        assert!(matches!(
            parse_entry("1 a 'x' S. b c", &t).unwrap_err(),
            EntryError::UnexpectedToken { offset: 13, .. }
        ));
        assert!(matches!(
            parse_entry("1 a 'x' S.", &t).unwrap_err(),
            EntryError::UnexpectedToken { offset: 10, .. }
        ));
    }

    #[test]
    fn gender_attaches_to_preceding_lemma_only() {
        let e = parse_entry("9 x 'y' G. oṭvũ, oṭī f.", &table()).unwrap();
        assert_eq!(e.reflexes.len(), 2);
        assert_eq!(e.reflexes[0].gender, Gender::None);
        assert_eq!(e.reflexes[1].gender, Gender::F);
        assert_eq!(e.reflexes[0].language_id, "G");
    }

    #[test]
    fn gloss_inheritance_within_a_clause() {
        let e = parse_entry("9 x 'y' G. a, b 'g', c; S. d", &table()).unwrap();
        let glosses: Vec<_> = e.reflexes.iter().map(|r| r.gloss.as_deref()).collect();
        assert_eq!(glosses, vec![None, Some("g"), Some("g"), None]);
    }

    #[test]
    fn compound_and_stacked_abbreviations() {
        let e = parse_entry("43 ákṣi n. 'eye' RV. Pa. Pk. akkhi- n.; Pash. Deg. achī́; Pash. ēc.", &table()).unwrap();
        let got: Vec<_> = e.reflexes.iter().map(|r| (r.language_id.as_str(), r.lemma.as_str())).collect();
        assert_eq!(got, vec![("Pa", "akkhi-"), ("Pk", "akkhi-"), ("PashDeg", "achī́"), ("Pash", "ēc")]);
        assert_eq!(e.headwords[0].tags, vec!["n."]);
        assert_eq!(e.clause_count, 3);
    }

    #[test]
    fn notes_are_verbatim() {
        let e = parse_entry(
            "7 a 'b' S. c (lex.) [< x]; cf. d, e 'f'; ext. -kk-; [Rather < y]",
            &table(),
        )
        .unwrap();
        assert_eq!(e.reflexes[0].notes, vec!["(lex.)", "[< x]"]);
        assert_eq!(e.notes, vec!["cf. d, e 'f'", "ext. -kk-", "[Rather < y]"]);
        assert_eq!(e.clause_count, 4);
    }

    #[test]
    fn trailing_full_stop_and_ellipsis() {
        let t = table();
        assert_eq!(parse_entry("7 a 'b' S. c.", &t).unwrap().reflexes[0].lemma, "c");
        assert_eq!(parse_entry("7 a 'b' S. c 'd'.", &t).unwrap().reflexes[0].gloss.as_deref(), Some("d"));
        assert_eq!(parse_entry("7 a 'b' S. c ...", &t).unwrap().reflexes.len(), 1);
    }

    #[test]
    fn input_is_nfc_normalised() {
        let decomposed = "5 a\u{0301}ks\u{0323}i 'eye' S. akhi";
        let e = parse_entry(decomposed, &table()).unwrap();
        assert_eq!(e.headwords[0].lemma, "ákṣi");
    }

    #[test]
    fn split_on_blank_lines() {
        let text = "1 a 'b'\nS. c\n\n \n2 d 'e'\n\n3 f\n";
        assert_eq!(split_entries(text), vec!["1 a 'b'\nS. c", "2 d 'e'", "3 f"]);
    }
}
