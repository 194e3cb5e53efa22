//! Tokenizer shared by the program and squeezer text formats.

use std::fmt;

use thiserror::Error;

/// A source position (1-based line and column).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// One of the punctuation or operator symbols.
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

// Longest symbols first so that greedy matching works.
const SYMBOLS: &[&str] = &[
    ":=", "==", "!=", "<=", ">=", "&&", "||", "->", "+=", "-=", "(", ")", "[", "]", "{", "}", ",",
    ";", ":", "=", "<", ">", "+", "-", "!",
];

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<i64>()
                .map_err(|_| SyntaxError::new(pos, format!("integer literal `{text}` out of range")))?;
            col += i - start;
            out.push((Tok::Int(v), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c == '\'' {
            // character literal: 'a' or '\0'
            let (v, len) = match (chars.get(i + 1), chars.get(i + 2), chars.get(i + 3)) {
                (Some('\\'), Some('0'), Some('\'')) => (0, 4),
                (Some(ch), Some('\''), _) if ch.is_ascii() && *ch != '\\' => (*ch as i64, 3),
                _ => return Err(SyntaxError::new(pos, "malformed character literal")),
            };
            i += len;
            col += len;
            out.push((Tok::Int(v), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                col += sym.len();
                out.push((Tok::Sym(sym), pos));
            }
            None => return Err(SyntaxError::new(pos, format!("unexpected character `{c}`"))),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// A cursor over a token stream with the usual peek/expect helpers.
pub struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Cursor {
            toks: tokenize(src)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.at + ahead).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.peek())))
        }
    }

    pub fn expect_ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {t}"))),
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_ident(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.peek())))
        }
    }

    pub fn expect_int(&mut self) -> Result<i64, SyntaxError> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                Ok(if neg { -v } else { v })
            }
            t => Err(self.error(format!("expected integer, found {t}"))),
        }
    }

    pub fn mark(&self) -> usize {
        self.at
    }

    pub fn reset(&mut self, mark: usize) {
        self.at = mark;
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.pos(), msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_symbols_and_chars() {
        let toks: Vec<Tok> = tokenize("a[n-2] <= 'a' && x := -3 // c\n'\\0'")
            .unwrap()
            .into_iter()
            .map(|t| t.0)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("["),
                Tok::Ident("n".into()),
                Tok::Sym("-"),
                Tok::Int(2),
                Tok::Sym("]"),
                Tok::Sym("<="),
                Tok::Int(97),
                Tok::Sym("&&"),
                Tok::Ident("x".into()),
                Tok::Sym(":="),
                Tok::Sym("-"),
                Tok::Int(3),
                Tok::Int(0),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_position() {
        let err = tokenize("x\n  @").unwrap_err();
        assert_eq!(err.pos, Pos { line: 2, col: 3 });
    }
}
