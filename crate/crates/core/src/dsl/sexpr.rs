use super::{quote, Cursor, ParseError, SourceSpan};

/// A parsed S-expression. Atoms keep whether they were quoted so that
/// serializers can reproduce them, but compare by text.
#[derive(Clone, Debug)]
pub enum SExpr {
    Atom { text: String, span: SourceSpan },
    List { items: Vec<SExpr>, span: SourceSpan },
}

impl SExpr {
    pub fn span(&self) -> SourceSpan {
        match self {
            SExpr::Atom { span, .. } | SExpr::List { span, .. } => *span,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List { items, .. } => Some(items),
            SExpr::Atom { .. } => None,
        }
    }

    /// The head atom of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }

    pub(crate) fn expect_atom(&self, what: &str) -> Result<&str, ParseError> {
        self.atom()
            .ok_or_else(|| ParseError::expected(self.span(), format!("expected {what}, found a list"), what))
    }

    pub(crate) fn expect_list(&self, what: &str) -> Result<&[SExpr], ParseError> {
        self.list().ok_or_else(|| {
            ParseError::expected(
                self.span(),
                format!("expected {what}, found `{}`", self.atom().unwrap_or_default()),
                what,
            )
        })
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"')
}

/// An atom that can be written without quotes.
pub(crate) fn is_plain_atom(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(is_delim)
}

pub(crate) fn atom_text(s: &str) -> String {
    if is_plain_atom(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn skip_trivia(cur: &mut Cursor) {
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
        } else if c == ';' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
        } else {
            break;
        }
    }
}

fn parse_one(cur: &mut Cursor) -> Result<SExpr, ParseError> {
    let start = cur.here();
    match cur.peek() {
        Some('(') => {
            cur.bump();
            let mut items = Vec::new();
            loop {
                skip_trivia(cur);
                match cur.peek() {
                    Some(')') => {
                        cur.bump();
                        return Ok(SExpr::List {
                            items,
                            span: cur.span_from(start),
                        });
                    }
                    None => {
                        return Err(ParseError::expected(cur.span_from(start), "unclosed list", "`)`"));
                    }
                    _ => items.push(parse_one(cur)?),
                }
            }
        }
        Some(')') => {
            cur.bump();
            Err(ParseError::new(cur.span_from(start), "unexpected `)`"))
        }
        Some('"') => {
            let text = cur.quoted()?;
            Ok(SExpr::Atom {
                text,
                span: cur.span_from(start),
            })
        }
        Some(_) => {
            while cur.peek().is_some_and(|c| !is_delim(c)) {
                cur.bump();
            }
            Ok(SExpr::Atom {
                text: cur.text[start.start..cur.pos].to_string(),
                span: cur.span_from(start),
            })
        }
        None => Err(ParseError::new(start, "unexpected end of input")),
    }
}

/// Parses every top-level form in `text`. `;` starts a comment.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    loop {
        skip_trivia(&mut cur);
        if cur.peek().is_none() {
            return Ok(out);
        }
        out.push(parse_one(&mut cur)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_spans() {
        let forms = parse_sexprs("; hi\n(a (b \"c d\") e)").unwrap();
        assert_eq!(forms.len(), 1);
        let items = forms[0].list().unwrap();
        assert_eq!(items[0].atom(), Some("a"));
        assert_eq!(items[1].list().unwrap()[1].atom(), Some("c d"));
        let span = items[2].span();
        assert_eq!((span.line, span.col, span.end - span.start), (2, 14, 1));
    }

    #[test]
    fn unbalanced_input_errors() {
        let e = parse_sexprs("(a (b)").unwrap_err();
        assert_eq!(e.expected.as_deref(), Some("`)`"));
        assert!(parse_sexprs(")").is_err());
        assert!(parse_sexprs("\"abc").is_err());
    }

    #[test]
    fn quoting_round_trips() {
        for s in ["plain", "with space", "semi;colon", "q\"uote", "(paren"] {
            let forms = parse_sexprs(&atom_text(s)).unwrap();
            assert_eq!(forms[0].atom(), Some(s));
        }
    }
}
