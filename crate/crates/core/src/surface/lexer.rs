use super::SurfaceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers, keywords and numerals; a numeral is an all-digit ident.
    Ident(String),
    Defines,
    Bar,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Semi,
    Comma,
    Colon,
    Question,
    Times,
    Arrow,
    PArrow,
    Plus,
    Eq,
    Lambda,
    Dot,
    Caret,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Byte offsets, used to detect adjacency as in `fold[List]`.
    pub start: usize,
    pub end: usize,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, SurfaceError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let at = |k: usize| chars.get(k).map(|(_, c)| *c);
    while i < chars.len() {
        let (start, c) = chars[i];
        let (tline, tcol) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '-' && at(i + 1) == Some('-') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = if ident_char(c) {
            let mut j = i;
            while j < chars.len() {
                let cj = chars[j].1;
                // `.` joins qualified names like `Nat.0` but never ends one
                if ident_char(cj) || (cj == '.' && j > i && at(j + 1).is_some_and(ident_char)) {
                    j += 1;
                } else {
                    break;
                }
            }
            let s: String = chars[i..j].iter().map(|(_, c)| *c).collect();
            (Tok::Ident(s), j - i)
        } else {
            match (c, at(i + 1), at(i + 2)) {
                (':', Some(':'), Some('=')) => (Tok::Defines, 3),
                ('-', Some('>'), _) => (Tok::Arrow, 2),
                ('|', ..) => (Tok::Bar, 1),
                ('(', ..) => (Tok::LParen, 1),
                (')', ..) => (Tok::RParen, 1),
                ('[', ..) => (Tok::LBrack, 1),
                (']', ..) => (Tok::RBrack, 1),
                (';', ..) => (Tok::Semi, 1),
                (',', ..) => (Tok::Comma, 1),
                (':', ..) => (Tok::Colon, 1),
                ('?', ..) => (Tok::Question, 1),
                ('×' | '*', ..) => (Tok::Times, 1),
                ('→', ..) => (Tok::Arrow, 1),
                ('⇀', ..) => (Tok::PArrow, 1),
                ('+', ..) => (Tok::Plus, 1),
                ('=', ..) => (Tok::Eq, 1),
                ('\\' | 'λ', ..) => (Tok::Lambda, 1),
                ('.', ..) => (Tok::Dot, 1),
                ('^', ..) => (Tok::Caret, 1),
                _ => return Err(SurfaceError::syntax(tline, tcol, format!("unexpected character {c:?}"))),
            }
        };
        let end = chars.get(i + len).map_or(src.len(), |(b, _)| *b);
        out.push(Token { tok, line: tline, col: tcol, start, end });
        advance(len, &mut i, &mut col);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ascii_aliases_match_unicode() {
        assert_eq!(toks("a * b -> c"), toks("a × b → c"));
    }

    #[test]
    fn comments_and_positions() {
        let ts = lex("-- note\n  foo ::=").unwrap();
        assert_eq!(ts[0].tok, Tok::Ident("foo".into()));
        assert_eq!((ts[0].line, ts[0].col), (2, 3));
        assert_eq!(ts[1].tok, Tok::Defines);
    }

    #[test]
    fn qualified_names_and_trailing_dots() {
        assert_eq!(toks("Nat.0"), vec![Tok::Ident("Nat.0".into())]);
        assert_eq!(toks("\\x. x"), vec![Tok::Lambda, Tok::Ident("x".into()), Tok::Dot, Tok::Ident("x".into())]);
    }

    #[test]
    fn stray_character_reports_column() {
        let err = lex("a\n  $").unwrap_err();
        assert_eq!(err, SurfaceError::syntax(2, 3, "unexpected character '$'".into()));
    }
}
