//! Spanned s-expression reader shared by both input formats.

use std::fmt;

use super::diag::{Diagnostic, ErrorCode, PResult, Span};

/// Lists nested deeper than this are rejected.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexpKind {
    Symbol(String),
    /// String literal contents with `""` escapes resolved.
    Str(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub span: Span,
}

impl Sexp {
    pub fn symbol(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(items) => Some(items),
            _ => None,
        }
    }

    /// Head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.symbol()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SexpKind::Symbol(s) => f.write_str(s),
            SexpKind::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            SexpKind::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Span {
        Span::new(self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self, depth: usize) -> PResult<Sexp> {
        self.skip_trivia();
        let span = self.pos();
        match self.chars.peek().copied() {
            None => Err(Diagnostic::error(
                ErrorCode::Parse,
                span,
                "unexpected end of input",
            )),
            Some(')') => Err(Diagnostic::error(ErrorCode::Parse, span, "unexpected `)`")),
            Some('(') => {
                if depth >= MAX_DEPTH {
                    return Err(Diagnostic::error(
                        ErrorCode::Parse,
                        span,
                        "nesting too deep",
                    ));
                }
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(Diagnostic::error(ErrorCode::Parse, span, "unclosed `(`"));
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp {
                                kind: SexpKind::List(items),
                                span,
                            });
                        }
                        Some(_) => items.push(self.read(depth + 1)?),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(Diagnostic::error(
                                ErrorCode::Parse,
                                span,
                                "unterminated string",
                            ));
                        }
                        Some('"') if self.chars.peek() == Some(&'"') => {
                            self.bump();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                    }
                }
                Ok(Sexp {
                    kind: SexpKind::Str(s),
                    span,
                })
            }
            Some('|') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(Diagnostic::error(
                                ErrorCode::Parse,
                                span,
                                "unterminated `|` symbol",
                            ));
                        }
                        Some('|') => break,
                        Some(c) => s.push(c),
                    }
                }
                if s.is_empty() || s.chars().any(|c| c.is_whitespace() || "();\"|".contains(c)) {
                    return Err(Diagnostic::error(
                        ErrorCode::Unsupported,
                        span,
                        "quoted symbol contents",
                    ));
                }
                Ok(Sexp {
                    kind: SexpKind::Symbol(s),
                    span,
                })
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || "();\"|".contains(c) {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp {
                    kind: SexpKind::Symbol(s),
                    span,
                })
            }
        }
    }
}

/// Every top-level s-expression in `text`.
pub fn read_all(text: &str) -> PResult<Vec<Sexp>> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read(0)?);
    }
}
