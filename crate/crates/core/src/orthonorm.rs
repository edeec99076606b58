//! Orthography profiles: grapheme segmentation and transcription
//! normalization.
//!
//! A profile is an ordered table of `grapheme → replacement` rules. Input is
//! NFC-normalized and scanned left to right; at each position the longest
//! matching grapheme wins. A grapheme may start with `^` (only matches at the
//! start of a word) or end with `$` (only matches at the end of a word);
//! words are delimited by whitespace and the ends of the input. Among
//! graphemes that consume the same number of codepoints, an anchored one beats
//! an unanchored one, and otherwise the earlier rule wins.
//!
//! Characters no rule covers are recorded as failures and skipped one
//! codepoint at a time. [`normalize`] passes them through unchanged.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::text::nfc;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("line {line}: malformed profile: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate grapheme {grapheme:?}")]
    DuplicateGrapheme { line: usize, grapheme: String },
    #[error("cannot read profile {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    /// Grapheme as written in the profile, anchors included.
    pub grapheme: String,
    pub replacement: String,
    source: Vec<char>,
    at_start: bool,
    at_end: bool,
}

impl Rule {
    fn new(grapheme: &str, replacement: &str) -> Option<Self> {
        let grapheme = nfc(grapheme);
        let mut body = grapheme.as_str();
        let at_start = body.len() > 1 && body.starts_with('^');
        if at_start {
            body = &body[1..];
        }
        let at_end = body.len() > 1 && body.ends_with('$');
        if at_end {
            body = &body[..body.len() - 1];
        }
        if body.is_empty() {
            return None;
        }
        Some(Self {
            source: body.chars().collect(),
            grapheme,
            replacement: nfc(replacement),
            at_start,
            at_end,
        })
    }

    /// Source text this rule consumes, without anchors.
    pub fn source(&self) -> String {
        self.source.iter().collect()
    }
}

#[derive(Debug, Clone)]
pub struct OrthoProfile {
    pub name: String,
    rules: Vec<Rule>,
    /// Rule indices by first codepoint, longest first, then profile order.
    by_first: HashMap<char, Vec<usize>>,
}

impl OrthoProfile {
    /// Builds a profile from `(grapheme, replacement)` pairs.
    pub fn from_rules<G, R>(name: &str, rules: impl IntoIterator<Item = (G, R)>) -> Result<Self, ProfileError>
    where
        G: AsRef<str>,
        R: AsRef<str>,
    {
        let mut out = Vec::new();
        for (i, (g, r)) in rules.into_iter().enumerate() {
            let rule = Rule::new(g.as_ref(), r.as_ref()).ok_or(ProfileError::Malformed {
                line: i + 1,
                message: "empty grapheme".into(),
            })?;
            if out.iter().any(|o: &Rule| o.grapheme == rule.grapheme) {
                return Err(ProfileError::DuplicateGrapheme {
                    line: i + 1,
                    grapheme: rule.grapheme,
                });
            }
            out.push(rule);
        }
        Ok(Self::index(name, out))
    }

    fn index(name: &str, rules: Vec<Rule>) -> Self {
        let mut by_first: HashMap<char, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_first.entry(r.source[0]).or_default().push(i);
        }
        for list in by_first.values_mut() {
            list.sort_by_key(|&i| {
                let r = &rules[i];
                let anchors = usize::from(r.at_start) + usize::from(r.at_end);
                (std::cmp::Reverse(r.source.len()), std::cmp::Reverse(anchors), i)
            });
        }
        Self {
            name: name.to_owned(),
            rules,
            by_first,
        }
    }

    /// Parses the TSV profile format: a `Grapheme\tReplacement` header, then
    /// one rule per line. Lines starting with `#` are comments. Further
    /// columns are ignored.
    pub fn parse(name: &str, text: &str) -> Result<Self, ProfileError> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.starts_with('#') && !l.is_empty());
        let (hline, header) = lines.next().ok_or(ProfileError::Malformed {
            line: 1,
            message: "missing header row".into(),
        })?;
        let cols: Vec<&str> = header.split('\t').collect();
        let gcol = cols.iter().position(|c| *c == "Grapheme");
        let rcol = cols.iter().position(|c| *c == "Replacement");
        let (Some(gcol), Some(rcol)) = (gcol, rcol) else {
            return Err(ProfileError::Malformed {
                line: hline,
                message: format!("header must name Grapheme and Replacement columns, got {header:?}"),
            });
        };

        let mut rules: Vec<Rule> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (line, l) in lines {
            let cells: Vec<&str> = l.split('\t').collect();
            if cells.len() <= gcol.max(rcol) {
                return Err(ProfileError::Malformed {
                    line,
                    message: format!("expected at least {} tab-separated cells", gcol.max(rcol) + 1),
                });
            }
            let rule = Rule::new(cells[gcol], cells[rcol]).ok_or(ProfileError::Malformed {
                line,
                message: "empty grapheme".into(),
            })?;
            if seen.insert(rule.grapheme.clone(), line).is_some() {
                return Err(ProfileError::DuplicateGrapheme {
                    line,
                    grapheme: rule.grapheme,
                });
            }
            rules.push(rule);
        }
        Ok(Self::index(name, rules))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }
}

/// Reads a profile file; the profile is named after the file stem.
pub fn load_profile(path: impl AsRef<Path>) -> Result<OrthoProfile, ProfileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ProfileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    OrthoProfile::parse(&name, &text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    /// Byte offset in the NFC input.
    pub offset: usize,
    /// Source text consumed.
    pub grapheme: String,
    pub replacement: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub offset: usize,
    pub ch: char,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SegmentationResult {
    pub tokens: Vec<Token>,
    pub failures: Vec<Failure>,
}

impl SegmentationResult {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// Matched graphemes and failed characters in input order.
    pub fn reconstruct(&self) -> String {
        self.pieces().map(|(src, _)| src).collect()
    }

    /// `(source, output)` pieces in input order; failures map to themselves.
    fn pieces(&self) -> impl Iterator<Item = (std::borrow::Cow<'_, str>, std::borrow::Cow<'_, str>)> {
        use std::borrow::Cow;
        let mut t = self.tokens.iter().peekable();
        let mut f = self.failures.iter().peekable();
        std::iter::from_fn(move || {
            let take_token = match (t.peek(), f.peek()) {
                (Some(a), Some(b)) => a.offset < b.offset,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => return None,
            };
            if take_token {
                let tok = t.next()?;
                Some((Cow::Borrowed(tok.grapheme.as_str()), Cow::Borrowed(tok.replacement.as_str())))
            } else {
                let s = f.next()?.ch.to_string();
                Some((Cow::Owned(s.clone()), Cow::Owned(s)))
            }
        })
    }
}

fn boundary(c: Option<&char>) -> bool {
    c.is_none_or(|c| c.is_whitespace())
}

/// Greedy leftmost-longest segmentation of `input` under `profile`.
pub fn segment(profile: &OrthoProfile, input: &str) -> SegmentationResult {
    let input = nfc(input);
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut out = SegmentationResult::default();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        let found = profile.by_first.get(&c).and_then(|cands| {
            cands.iter().map(|&r| &profile.rules[r]).find(|rule| {
                let n = rule.source.len();
                i + n <= chars.len()
                    && chars[i..i + n].iter().map(|(_, c)| c).eq(rule.source.iter())
                    && (!rule.at_start || boundary(i.checked_sub(1).map(|p| &chars[p].1)))
                    && (!rule.at_end || boundary(chars.get(i + n).map(|(_, c)| c)))
            })
        });
        match found {
            Some(rule) => {
                let n = rule.source.len();
                let end = chars.get(i + n).map_or(input.len(), |(b, _)| *b);
                out.tokens.push(Token {
                    offset,
                    grapheme: input[offset..end].to_owned(),
                    replacement: rule.replacement.clone(),
                });
                i += n;
            }
            None => {
                out.failures.push(Failure { offset, ch: c });
                i += 1;
            }
        }
    }
    out
}

/// Concatenated replacements; `ok` is false when any character failed.
pub fn normalize(profile: &OrthoProfile, input: &str) -> (String, bool) {
    let seg = segment(profile, input);
    let out = seg.pieces().map(|(_, r)| r).collect();
    (out, seg.is_ok())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConversionReport {
    pub converted: usize,
    pub failed: usize,
    /// Occurrences of each offending character across failed forms.
    pub histogram: BTreeMap<char, usize>,
}

impl ConversionReport {
    pub fn total(&self) -> usize {
        self.converted + self.failed
    }

    /// Percentage converted; 100 for an empty batch.
    pub fn rate(&self) -> f64 {
        if self.total() == 0 {
            100.0
        } else {
            100.0 * self.converted as f64 / self.total() as f64
        }
    }

    pub fn merge(&mut self, other: &ConversionReport) {
        self.converted += other.converted;
        self.failed += other.failed;
        for (c, n) in &other.histogram {
            *self.histogram.entry(*c).or_default() += n;
        }
    }
}

impl fmt::Display for ConversionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "converted {}/{} ({:.1}%)", self.converted, self.total(), self.rate())
    }
}

pub fn conversion_report<S: AsRef<str> + Sync>(profile: &OrthoProfile, forms: &[S]) -> ConversionReport {
    use rayon::prelude::*;
    forms
        .par_iter()
        .map(|form| {
            let seg = segment(profile, form.as_ref());
            let mut r = ConversionReport::default();
            if seg.is_ok() {
                r.converted = 1;
            } else {
                r.failed = 1;
                for fl in &seg.failures {
                    *r.histogram.entry(fl.ch).or_default() += 1;
                }
            }
            r
        })
        .reduce(ConversionReport::default, |mut a, b| {
            a.merge(&b);
            a
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(rules: &[(&str, &str)]) -> OrthoProfile {
        OrthoProfile::from_rules("t", rules.iter().copied()).unwrap()
    }

    fn graphemes(r: &SegmentationResult) -> Vec<&str> {
        r.tokens.iter().map(|t| t.grapheme.as_str()).collect()
    }

    #[test]
    fn loads_two_rules() {
        let p = OrthoProfile::parse("x", "Grapheme\tReplacement\na\ta\nbh\tbʰ\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.rules()[1].replacement, "bʰ");
    }

    #[test]
    fn comments_extra_columns_and_crlf() {
        let p = OrthoProfile::parse(
            "x",
            "# comment\r\nGrapheme\tIPA\tReplacement\r\n# another\r\nc\tts\tc\r\n\r\n",
        )
        .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.rules()[0].grapheme, "c");
    }

    #[test]
    fn duplicate_grapheme_rejected_after_nfc() {
        let err = OrthoProfile::parse("x", "Grapheme\tReplacement\na\ta\na\tb\n").unwrap_err();
        assert!(matches!(err, ProfileError::DuplicateGrapheme { line: 3, .. }));
        let err = OrthoProfile::parse("x", "Grapheme\tReplacement\nā\ta\na\u{304}\tb\n").unwrap_err();
        assert!(matches!(err, ProfileError::DuplicateGrapheme { .. }));
    }

    #[test]
    fn malformed_profiles() {
        assert!(matches!(
            OrthoProfile::parse("x", "Grapheme,Replacement\n"),
            Err(ProfileError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            OrthoProfile::parse("x", ""),
            Err(ProfileError::Malformed { .. })
        ));
        assert!(matches!(
            OrthoProfile::parse("x", "Grapheme\tReplacement\nab\n"),
            Err(ProfileError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            OrthoProfile::parse("x", "Grapheme\tReplacement\n\tq\n"),
            Err(ProfileError::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn header_only_profile_fails_every_char() {
        let p = OrthoProfile::parse("x", "Grapheme\tReplacement\n").unwrap();
        assert!(p.is_empty());
        let r = segment(&p, "ab");
        assert!(r.tokens.is_empty());
        assert_eq!(r.failures.len(), 2);
    }

    #[test]
    fn longest_match_beats_prefix() {
        let r = segment(&profile(&[("a", "a"), ("ab", "X")]), "ab");
        assert_eq!(graphemes(&r), vec!["ab"]);
        assert_eq!(r.tokens[0].replacement, "X");
        assert!(r.is_ok());
    }

    #[test]
    fn identity_profile() {
        let p = profile(&[("u", "u"), ("č", "č"), ("h", "h"), ("a", "a"), ("r", "r")]);
        let r = segment(&p, "učhar");
        assert_eq!(r.tokens.len(), 5);
        assert!(r.is_ok());
    }

    #[test]
    fn unknown_char_is_a_failure() {
        let r = segment(&profile(&[("a", "a")]), "q");
        assert!(r.tokens.is_empty());
        assert_eq!(r.failures, vec![Failure { offset: 0, ch: 'q' }]);
    }

    #[test]
    fn failures_pass_through_normalize() {
        let p = profile(&[("a", "A")]);
        assert_eq!(normalize(&p, "aqa"), ("AqA".to_owned(), false));
        assert_eq!(segment(&p, "aqa").reconstruct(), "aqa");
    }

    #[test]
    fn anchors_restrict_to_word_edges() {
        let p = profile(&[("a", "a"), ("^a", "A"), ("a$", "Ā"), ("b", "b"), (" ", " ")]);
        assert_eq!(normalize(&p, "aba").0, "AbĀ");
        assert_eq!(normalize(&p, "ab ba").0, "Ab bĀ");
        // the anchor is not part of the matched grapheme
        let r = segment(&p, "ab");
        assert_eq!(graphemes(&r), vec!["a", "b"]);
        assert_eq!(r.reconstruct(), "ab");
    }

    #[test]
    fn equal_length_ties_go_to_the_earlier_rule() {
        let p = profile(&[("^a", "first"), ("a$", "second")]);
        assert_eq!(normalize(&p, "a").0, "first");
        let p = profile(&[("a$", "second"), ("^a", "first")]);
        assert_eq!(normalize(&p, "a").0, "second");
        let p = profile(&[("x", "1"), ("y", "2")]);
        assert_eq!(normalize(&p, "xy").0, "12");
    }

    #[test]
    fn consumed_length_outranks_anchoring() {
        let p = profile(&[("^a", "A"), ("ab", "X"), ("b", "b")]);
        assert_eq!(normalize(&p, "ab").0, "X");
    }

    #[test]
    fn lone_markers_are_literal() {
        let p = profile(&[("^", "caret"), ("$", "dollar")]);
        assert_eq!(normalize(&p, "^$").0, "caretdollar");
    }

    #[test]
    fn decomposed_input_is_composed_first() {
        let p = profile(&[("ā", "aa")]);
        assert_eq!(normalize(&p, "a\u{0304}"), ("aa".to_owned(), true));
    }

    #[test]
    fn report_counts_and_histogram() {
        let p = profile(&[("a", "a"), ("b", "b")]);
        let r = conversion_report(&p, &["ab", "ba", "aq"]);
        assert_eq!((r.converted, r.failed), (2, 1));
        assert_eq!(r.histogram, BTreeMap::from([('q', 1)]));
        assert_eq!(r.to_string(), "converted 2/3 (66.7%)");
        let r = conversion_report(&p, &["aqq", "xa"]);
        assert_eq!(r.histogram, BTreeMap::from([('q', 2), ('x', 1)]));
        let r = conversion_report(&p, &["a", "b"]);
        assert_eq!(r.failed, 0);
    }
}
