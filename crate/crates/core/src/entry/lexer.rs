use super::EntryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Word,
    /// Quoted gloss; `inner` excludes the quote marks.
    Gloss,
    /// `[...]`; `inner` excludes the brackets.
    Bracket,
    /// `(...)` standing as its own token.
    Paren,
    Comma,
    Semi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: Kind,
    pub start: usize,
    pub end: usize,
    pub inner_start: usize,
    pub inner_end: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }

    pub fn inner<'a>(&self, src: &'a str) -> &'a str {
        &src[self.inner_start..self.inner_end]
    }
}

fn simple(kind: Kind, start: usize, end: usize) -> Token {
    Token { kind, start, end, inner_start: start, inner_end: end }
}

/// Splits an entry into tokens. Every byte of `src` is either whitespace or
/// covered by exactly one token, so nothing can be dropped silently later.
pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, EntryError> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        match c {
            ';' | ',' => {
                it.next();
                let kind = if c == ';' { Kind::Semi } else { Kind::Comma };
                out.push(simple(kind, i, i + 1));
            }
            '‘' | '`' | '\'' => {
                let tok = quoted(src, i, c)?;
                while it.peek().is_some_and(|&(j, _)| j < tok.end) {
                    it.next();
                }
                out.push(tok);
            }
            '[' | '(' => {
                let close = if c == '[' { ']' } else { ')' };
                let end = matching(src, i, c, close)?;
                while it.peek().is_some_and(|&(j, _)| j < end) {
                    it.next();
                }
                let (kind, inner_start, inner_end) = if c == '[' {
                    (Kind::Bracket, i + 1, end - 1)
                } else {
                    (Kind::Paren, i, end)
                };
                out.push(Token { kind, start: i, end, inner_start, inner_end });
            }
            ']' | ')' | '’' => {
                return Err(EntryError::Unbalanced { offset: i, delimiter: c });
            }
            _ => {
                let start = i;
                let mut end = i;
                while let Some(&(j, d)) = it.peek() {
                    if d.is_whitespace() || matches!(d, ';' | ',' | '‘' | '[' | ']' | ')' | '’') {
                        break;
                    }
                    if d == '(' {
                        // parenthesised letters inside a word, e.g. "a(k)kh-"
                        let close = matching(src, j, '(', ')')?;
                        while it.peek().is_some_and(|&(k, _)| k < close) {
                            it.next();
                        }
                        end = close;
                        continue;
                    }
                    it.next();
                    end = j + d.len_utf8();
                }
                out.push(simple(Kind::Word, start, end));
            }
        }
    }
    Ok(out)
}

/// End (exclusive) of the group opened at `start`, honouring nesting.
fn matching(src: &str, start: usize, open: char, close: char) -> Result<usize, EntryError> {
    let mut depth = 0usize;
    for (j, d) in src[start..].char_indices() {
        if d == open {
            depth += 1;
        } else if d == close {
            depth -= 1;
            if depth == 0 {
                return Ok(start + j + d.len_utf8());
            }
        }
    }
    Err(EntryError::Unbalanced { offset: start, delimiter: open })
}

/// A gloss opened by `open` at `start`. Curly quotes close on `’`. Straight
/// quotes close on a `'` (or `’`) that is not followed by a letter, so
/// apostrophes inside words ("man's") survive.
fn quoted(src: &str, start: usize, open: char) -> Result<Token, EntryError> {
    let body = start + open.len_utf8();
    let mut chars = src[body..].char_indices().peekable();
    while let Some((j, d)) = chars.next() {
        let closes = match open {
            '‘' => d == '’',
            _ => {
                (d == '\'' || d == '’')
                    && !chars.peek().is_some_and(|&(_, n)| n.is_alphanumeric())
            }
        };
        if closes {
            let end = body + j + d.len_utf8();
            return Ok(Token {
                kind: Kind::Gloss,
                start,
                end,
                inner_start: body,
                inner_end: body + j,
            });
        }
    }
    Err(EntryError::Unbalanced { offset: start, delimiter: open })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(Kind, &str)> {
        tokenize(src).unwrap().iter().map(|t| (t.kind, t.inner(src))).collect()
    }

    #[test]
    fn basic_tokens() {
        use Kind::*;
        assert_eq!(
            kinds("454 ápavartayati tr. 'turns away from' RV. [√vṛt1] 1. Pk. ōvattēi;"),
            vec![
                (Word, "454"),
                (Word, "ápavartayati"),
                (Word, "tr."),
                (Gloss, "turns away from"),
                (Word, "RV."),
                (Bracket, "√vṛt1"),
                (Word, "1."),
                (Word, "Pk."),
                (Word, "ōvattēi"),
                (Semi, ";"),
            ]
        );
    }

    #[test]
    fn quote_styles() {
        use Kind::*;
        assert_eq!(kinds("‘a b’"), vec![(Gloss, "a b")]);
        assert_eq!(kinds("'the man's son'"), vec![(Gloss, "the man's son")]);
        assert_eq!(kinds("`x'"), vec![(Gloss, "x")]);
        assert_eq!(kinds("'x',y"), vec![(Gloss, "x"), (Comma, ","), (Word, "y")]);
        assert_eq!(kinds("dew'âz"), vec![(Word, "dew'âz")]);
    }

    #[test]
    fn parens_inside_and_outside_words() {
        use Kind::*;
        assert_eq!(kinds("a(k)kh- (lex.)"), vec![(Word, "a(k)kh-"), (Paren, "(lex.)")]);
        assert_eq!(kinds("[a [b] c]"), vec![(Bracket, "a [b] c")]);
    }

    #[test]
    fn unbalanced() {
        assert_eq!(
            tokenize("1 a 'open").unwrap_err(),
            EntryError::Unbalanced { offset: 4, delimiter: '\'' }
        );
        assert_eq!(
            tokenize("1 a [x").unwrap_err(),
            EntryError::Unbalanced { offset: 4, delimiter: '[' }
        );
        assert_eq!(
            tokenize("1 a x]").unwrap_err(),
            EntryError::Unbalanced { offset: 5, delimiter: ']' }
        );
    }

    #[test]
    fn tokens_cover_all_non_space() {
        let src = "454 ápavartayati 'x y', (p) [e]; G. a(b)c…";
        let toks = tokenize(src).unwrap();
        let mut covered = vec![false; src.len()];
        for t in &toks {
            for b in covered.iter_mut().take(t.end).skip(t.start) {
                assert!(!*b);
                *b = true;
            }
        }
        for (i, c) in src.char_indices() {
            assert!(covered[i] || c.is_whitespace(), "byte {i} {c:?}");
        }
    }
}
