use std::fmt;

use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(usize),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Star,
    Eq,
    Arrow,
    Le,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '-'
}

/// Splits `text` into tokens. `#` starts a comment running to the end of
/// the line. Identifiers may contain `-` except directly before `>`.
pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match (c, two.as_str()) {
            (_, "->") => {
                advance(2, &mut i);
                Tok::Arrow
            }
            (_, "<=") => {
                advance(2, &mut i);
                Tok::Le
            }
            ('{', _) | ('}', _) | ('[', _) | (']', _) | ('(', _) | (')', _) | (':', _) | (',', _) | ('.', _) | ('*', _) | ('=', _) => {
                advance(1, &mut i);
                match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '*' => Tok::Star,
                    _ => Tok::Eq,
                }
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let n = s.parse().map_err(|_| Diagnostic::new(span, format!("number `{s}` is too large")))?;
                Tok::Number(n)
            }
            _ if ident_start(c) => {
                let start = i;
                i += 1;
                while i < chars.len() && ident_continue(chars[i]) && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>')) {
                    i += 1;
                }
                col += i - start;
                Tok::Ident(chars[start..i].iter().collect())
            }
            _ => return Err(Diagnostic::new(span, format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_split_identifiers() {
        assert_eq!(
            toks("f: a->b-c # note"),
            vec![
                Tok::Ident("f".into()),
                Tok::Colon,
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b-c".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = lex("poset {\n  0 <= 1\n}").unwrap();
        assert_eq!((t[2].span.line, t[2].span.column), (2, 3));
        assert_eq!((t[3].span.line, t[3].span.column), (2, 5));
    }

    #[test]
    fn stray_character_is_positioned() {
        let e = lex("a\n  $").unwrap_err();
        assert_eq!((e.span.line, e.span.column), (2, 3));
    }
}
