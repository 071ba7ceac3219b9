//! Text formats: S-expression planning files (`.pdom`, `.pinst`, `.pplan`)
//! and the line-oriented C*-RASP program syntax (`.crasp`).

mod crasp_text;
mod planning;
mod sexpr;

use std::fmt;

use thiserror::Error;

pub use crasp_text::{parse_crasp, parse_word, serialize_crasp, serialize_word};
pub use planning::{
    parse_domain, parse_instance, parse_plan, serialize_domain, serialize_instance, serialize_plan,
};
pub use sexpr::{parse_sexprs, SExpr};

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl SourceSpan {
    /// Smallest span covering both.
    pub fn join(self, other: SourceSpan) -> SourceSpan {
        let (first, _) = if self.start <= other.start { (self, other) } else { (other, self) };
        SourceSpan {
            start: first.start,
            end: self.end.max(other.end),
            line: first.line,
            col: first.col,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {message}{}", .expected.as_ref().map(|e| format!(" (expected {e})")).unwrap_or_default())]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Option<String>,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        let message = message.into();
        debug_assert!(!message.is_empty());
        ParseError {
            span,
            message,
            expected: None,
        }
    }

    pub fn expected(span: SourceSpan, message: impl Into<String>, expected: impl Into<String>) -> Self {
        ParseError {
            expected: Some(expected.into()),
            ..ParseError::new(span, message)
        }
    }
}

/// Tracks line/column while scanning.
#[derive(Clone, Debug)]
pub(crate) struct Cursor<'a> {
    pub text: &'a str,
    pub pos: usize,
    pub line: usize,
    pub col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Self {
        Cursor {
            text,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    pub fn peek2(&self) -> Option<char> {
        let mut it = self.text[self.pos..].chars();
        it.next();
        it.next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn here(&self) -> SourceSpan {
        SourceSpan {
            start: self.pos,
            end: self.pos,
            line: self.line,
            col: self.col,
        }
    }

    pub fn span_from(&self, start: SourceSpan) -> SourceSpan {
        SourceSpan {
            end: self.pos,
            ..start
        }
    }

    /// Reads a `"…"` string with `\"` and `\\` escapes; the cursor sits on the
    /// opening quote.
    pub fn quoted(&mut self) -> Result<String, ParseError> {
        let start = self.here();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(ParseError::expected(self.span_from(start), "unterminated string", "`\"`")),
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(c @ ('"' | '\\')) => out.push(c),
                    _ => return Err(ParseError::new(self.span_from(start), "bad escape in string")),
                },
                Some(c) => out.push(c),
            }
        }
    }
}

/// Writes `s` as a quoted string literal.
pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
