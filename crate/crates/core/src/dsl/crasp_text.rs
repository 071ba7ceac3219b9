use std::collections::HashMap;
use std::fmt::Write;

use super::{quote, Cursor, ParseError, SourceSpan};
use crate::crasp::{is_line_name, Conjunct, CraspError, CraspProgram, LocalRel, MatchSpec, Op, Symbol};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(u64),
    Assign,
    Sep,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Le,
    Lt,
    Eq,
    Plus,
    Minus,
    Bar,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => quote(s),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sep => "end of statement".into(),
            t => format!(
                "`{}`",
                match t {
                    Tok::Assign => ":=",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Comma => ",",
                    Tok::Le => "<=",
                    Tok::Lt => "<",
                    Tok::Eq => "=",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    _ => "|",
                }
            ),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.here();
        let tok = match c {
            '\n' | ';' => {
                cur.bump();
                Tok::Sep
            }
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            '"' => Tok::Str(cur.quoted()?),
            c if c.is_ascii_digit() => {
                while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
                let digits = &text[start.start..cur.pos];
                Tok::Int(
                    digits
                        .parse()
                        .map_err(|_| ParseError::new(cur.span_from(start), "integer out of range"))?,
                )
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while cur
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                {
                    cur.bump();
                }
                Tok::Ident(text[start.start..cur.pos].to_string())
            }
            ':' if cur.peek2() == Some('=') => {
                cur.bump();
                cur.bump();
                Tok::Assign
            }
            '<' if cur.peek2() == Some('=') => {
                cur.bump();
                cur.bump();
                Tok::Le
            }
            _ => {
                cur.bump();
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '<' => Tok::Lt,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '|' => Tok::Bar,
                    _ => return Err(ParseError::new(cur.span_from(start), format!("unexpected character `{c}`"))),
                }
            }
        };
        out.push((tok, cur.span_from(start)));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, SourceSpan)],
    pos: usize,
    end: SourceSpan,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn at_stmt_end(&self) -> bool {
        matches!(self.peek(), None | Some(Tok::Sep))
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = self.peek().map_or("end of input".into(), Tok::describe);
        ParseError::expected(self.span(), format!("unexpected {found}"), expected)
    }

    fn next(&mut self) -> Option<(Tok, SourceSpan)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += t.is_some() as usize;
        t
    }

    fn eat(&mut self, tok: &Tok, expected: &str) -> Result<SourceSpan, ParseError> {
        if self.peek() == Some(tok) {
            Ok(self.next().unwrap().1)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some((Tok::Ident(s), span)) => Ok((s, span)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected(expected)),
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn small(&mut self) -> Result<u32, ParseError> {
        let span = self.span();
        u32::try_from(self.int()?).map_err(|_| ParseError::new(span, "offset out of range"))
    }

    fn signed(&mut self) -> Result<i64, ParseError> {
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.pos += 1;
        }
        let span = self.span();
        let n = i64::try_from(self.int()?).map_err(|_| ParseError::new(span, "shift out of range"))?;
        Ok(if neg { -n } else { n })
    }

    fn symbol(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some((Tok::Ident(s), _)) | Some((Tok::Str(s), _)) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.unexpected("a Σ symbol"))
            }
        }
    }
}

struct Lines {
    index: HashMap<String, usize>,
    defined: usize,
}

impl Lines {
    fn resolve(&self, name: &str, span: SourceSpan) -> Result<usize, ParseError> {
        match self.index.get(name) {
            Some(&i) if i < self.defined => Ok(i),
            Some(_) => Err(ParseError::new(span, format!("forward reference to `{name}`"))),
            None => Err(ParseError::new(span, format!("unknown line `{name}`"))),
        }
    }
}

struct SigmaTable {
    fixed: bool,
    symbols: Vec<String>,
}

impl SigmaTable {
    fn id(&mut self, sym: String, span: SourceSpan) -> Result<u32, ParseError> {
        if let Some(i) = self.symbols.iter().position(|s| *s == sym) {
            return Ok(i as u32);
        }
        if self.fixed {
            return Err(ParseError::new(span, format!("unknown Σ symbol `{sym}`")));
        }
        self.symbols.push(sym);
        Ok(self.symbols.len() as u32 - 1)
    }
}

fn parse_op(p: &mut Parser, lines: &Lines, sigma: &mut SigmaTable) -> Result<Op, ParseError> {
    let operand = |p: &mut Parser| -> Result<usize, ParseError> {
        let (name, span) = p.ident("a line name")?;
        lines.resolve(&name, span)
    };
    let head_span = p.span();
    match p.peek().cloned() {
        Some(Tok::Int(1)) => {
            p.pos += 1;
            Ok(Op::One)
        }
        Some(Tok::Ident(id)) if id.starts_with("Q_") => {
            p.pos += 1;
            let sym = if id == "Q_" { p.symbol()? } else { id[2..].to_string() };
            Ok(Op::Initial(sigma.id(sym, head_span)?))
        }
        Some(Tok::Ident(id)) if id == "true" => {
            p.pos += 1;
            Ok(Op::True)
        }
        Some(Tok::Ident(id)) if id == "not" => {
            p.pos += 1;
            Ok(Op::Not(operand(p)?))
        }
        Some(Tok::Ident(id)) if id == "if" => {
            p.pos += 1;
            let c = operand(p)?;
            p.keyword("then")?;
            let a = operand(p)?;
            p.keyword("else")?;
            let b = operand(p)?;
            Ok(Op::Cond(c, a, b))
        }
        Some(Tok::Ident(id)) if id == "count" => {
            p.pos += 1;
            p.eat(&Tok::LParen, "`(`")?;
            p.keyword("j")?;
            p.eat(&Tok::Le, "`<=`")?;
            p.keyword("i")?;
            p.eat(&Tok::Comma, "`,`")?;
            let mut rel = LocalRel::Top;
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "i") {
                p.pos += 1;
                p.eat(&Tok::Eq, "`=`")?;
                p.keyword("j")?;
                p.eat(&Tok::Plus, "`+`")?;
                rel = LocalRel::Offset(p.small()?);
                p.eat(&Tok::Comma, "`,`")?;
            }
            let filter = operand(p)?;
            p.eat(&Tok::RParen, "`)`")?;
            Ok(Op::Count { filter, rel })
        }
        Some(Tok::Ident(id)) if id == "match" => {
            p.pos += 1;
            p.eat(&Tok::LParen, "`(`")?;
            p.keyword("j")?;
            let strict = match p.peek() {
                Some(Tok::Le) => false,
                Some(Tok::Lt) => true,
                _ => return Err(p.unexpected("`<=` or `<`")),
            };
            p.pos += 1;
            p.keyword("i")?;
            p.eat(&Tok::Comma, "`,`")?;
            let mut filter = None;
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "filter") {
                p.pos += 1;
                filter = Some(operand(p)?);
                p.eat(&Tok::Comma, "`,`")?;
            }
            p.eat(&Tok::LBracket, "`[`")?;
            let mut conjuncts = Vec::new();
            while p.peek() != Some(&Tok::RBracket) {
                if !conjuncts.is_empty() {
                    p.eat(&Tok::Comma, "`,` or `]`")?;
                }
                p.eat(&Tok::LParen, "`(`")?;
                let past = p.small()?;
                p.eat(&Tok::Comma, "`,`")?;
                let current = p.small()?;
                p.eat(&Tok::Comma, "`,`")?;
                let shift = p.signed()?;
                p.eat(&Tok::RParen, "`)`")?;
                conjuncts.push(Conjunct::new(past, current, shift));
            }
            p.pos += 1;
            p.eat(&Tok::RParen, "`)`")?;
            Ok(Op::Match(MatchSpec {
                conjuncts,
                filter,
                strict,
            }))
        }
        Some(Tok::Ident(_)) => {
            let a = operand(p)?;
            let op = p.peek().cloned();
            let ctor: fn(usize, usize) -> Op = match op {
                Some(Tok::Ident(s)) if s == "and" => Op::And,
                Some(Tok::Le) => Op::Leq,
                Some(Tok::Plus) => Op::Add,
                Some(Tok::Minus) => Op::Sub,
                _ => return Err(p.unexpected("`and`, `<=`, `+` or `-`")),
            };
            p.pos += 1;
            let b = operand(p)?;
            Ok(ctor(a, b))
        }
        _ => Err(p.unexpected("an operation")),
    }
}

/// Parses `.crasp` text. Statements end at a newline or `;`; `#` starts a
/// comment. Optional headers `sigma SYM …` (fixes Σ and its order) and
/// `bandwidth N` may appear before the first line; without a `sigma` header
/// Σ is the set of `Q_` symbols in order of first use.
///
/// ```text
/// sigma "$" "@" a
/// P1 := Q_"@"
/// C1 := count(j<=i, P1)
/// M  := match(j<i, filter P1, [(0,1,0), (1,0,-2)])
/// OUT := C1 <= M
/// ```
pub fn parse_crasp(text: &str) -> Result<CraspProgram, ParseError> {
    let toks = lex(text)?;
    let end = SourceSpan {
        start: text.len(),
        end: text.len(),
        ..Cursor::new(text).here()
    };
    // First pass: statement boundaries and line names.
    let mut stmts: Vec<&[(Tok, SourceSpan)]> = Vec::new();
    for chunk in toks.split(|t| t.0 == Tok::Sep) {
        if !chunk.is_empty() {
            stmts.push(chunk);
        }
    }
    let mut lines = Lines {
        index: HashMap::new(),
        defined: 0,
    };
    let mut sigma = SigmaTable {
        fixed: false,
        symbols: Vec::new(),
    };
    let mut bandwidth = None;
    let mut names = Vec::new();
    let mut spans = Vec::new();
    for stmt in &stmts {
        if let (Tok::Ident(n), span) = &stmt[0] {
            if stmt.get(1).map(|t| &t.0) == Some(&Tok::Assign) {
                if !is_line_name(n) {
                    return Err(ParseError::new(*span, format!("`{n}` cannot name a line")));
                }
                if lines.index.insert(n.clone(), names.len()).is_some() {
                    return Err(ParseError::new(*span, format!("duplicate line name `{n}`")));
                }
                names.push(n.clone());
                spans.push(*span);
            }
        }
    }
    let mut ops = Vec::with_capacity(names.len());
    for stmt in stmts {
        let mut p = Parser {
            toks: stmt,
            pos: 0,
            end: stmt.last().map_or(end, |t| SourceSpan {
                start: t.1.end,
                ..t.1
            }),
        };
        match &stmt[0].0 {
            Tok::Ident(kw) if kw == "sigma" && stmt.get(1).map(|t| &t.0) != Some(&Tok::Assign) => {
                if sigma.fixed || !ops.is_empty() {
                    return Err(ParseError::new(stmt[0].1, "`sigma` must come once, before the first line"));
                }
                p.pos = 1;
                while !p.at_stmt_end() {
                    let span = p.span();
                    let s = p.symbol()?;
                    if sigma.symbols.contains(&s) {
                        return Err(ParseError::new(span, format!("duplicate Σ symbol `{s}`")));
                    }
                    sigma.symbols.push(s);
                }
                sigma.fixed = true;
            }
            Tok::Ident(kw) if kw == "bandwidth" && stmt.get(1).map(|t| &t.0) != Some(&Tok::Assign) => {
                p.pos = 1;
                bandwidth = Some(p.small()?);
                if !p.at_stmt_end() {
                    return Err(p.unexpected("end of statement"));
                }
            }
            _ => {
                p.ident("a line name")?;
                p.eat(&Tok::Assign, "`:=`")?;
                let op = parse_op(&mut p, &lines, &mut sigma)?;
                if !p.at_stmt_end() {
                    return Err(p.unexpected("end of statement"));
                }
                ops.push(op);
                lines.defined += 1;
            }
        }
    }
    let names_given = names.clone();
    CraspProgram::new(sigma.symbols, ops, Some(names), bandwidth).map_err(|e| {
        let span = error_line(&e).and_then(|l| spans.get(l).copied()).unwrap_or(end);
        let message = match &e {
            CraspError::SortMismatch { line, operand, expected, found } => format!(
                "line `{}`: operand `{}` is {found}, expected {expected}",
                names_given[*line], names_given[*operand]
            ),
            CraspError::OutputNotBoolean => format!(
                "last line `{}` is count-valued; the output must be boolean",
                names_given.last().unwrap()
            ),
            e => e.to_string(),
        };
        let span = if matches!(e, CraspError::OutputNotBoolean) {
            spans.last().copied().unwrap_or(end)
        } else {
            span
        };
        ParseError::new(span, message)
    })
}

fn error_line(e: &CraspError) -> Option<usize> {
    match e {
        CraspError::ForwardReference { line, .. }
        | CraspError::SortMismatch { line, .. }
        | CraspError::EmptyMatch { line }
        | CraspError::BandwidthExceeded { line, .. }
        | CraspError::SigmaOutOfRange { line, .. } => Some(*line),
        _ => None,
    }
}

fn sigma_text(s: &str) -> String {
    let ident = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if ident {
        s.to_string()
    } else {
        quote(s)
    }
}

/// Canonical `.crasp` text: `sigma` and `bandwidth` headers, then one line
/// per operation. `parse_crasp` inverts it.
pub fn serialize_crasp(program: &CraspProgram) -> String {
    let names = program.names();
    let mut out = String::from("sigma");
    for s in program.sigma() {
        out.push(' ');
        out.push_str(&sigma_text(s));
    }
    writeln!(out, "\nbandwidth {}", program.bandwidth()).unwrap();
    for (name, op) in names.iter().zip(program.ops()) {
        write!(out, "{name} := ").unwrap();
        let n = |i: &usize| names[*i].as_str();
        match op {
            Op::Initial(s) => {
                let sym = &program.sigma()[*s as usize];
                if sym.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !sym.is_empty() {
                    write!(out, "Q_{sym}")
                } else {
                    write!(out, "Q_{}", quote(sym))
                }
            }
            Op::Not(a) => write!(out, "not {}", n(a)),
            Op::And(a, b) => write!(out, "{} and {}", n(a), n(b)),
            Op::True => write!(out, "true"),
            Op::Leq(a, b) => write!(out, "{} <= {}", n(a), n(b)),
            Op::Count {
                filter,
                rel: LocalRel::Top,
            } => write!(out, "count(j<=i, {})", n(filter)),
            Op::Count {
                filter,
                rel: LocalRel::Offset(d),
            } => write!(out, "count(j<=i, i=j+{d}, {})", n(filter)),
            Op::Match(m) => {
                write!(out, "match(j{}i, ", if m.strict { "<" } else { "<=" }).unwrap();
                if let Some(f) = &m.filter {
                    write!(out, "filter {}, ", n(f)).unwrap();
                }
                let cs: Vec<String> = m
                    .conjuncts
                    .iter()
                    .map(|c| format!("({},{},{})", c.past, c.current, c.shift))
                    .collect();
                write!(out, "[{}])", cs.join(", "))
            }
            Op::Cond(c, a, b) => write!(out, "if {} then {} else {}", n(c), n(a), n(b)),
            Op::Add(a, b) => write!(out, "{} + {}", n(a), n(b)),
            Op::Sub(a, b) => write!(out, "{} - {}", n(a), n(b)),
            Op::One => write!(out, "1"),
        }
        .unwrap();
        out.push('\n');
    }
    out
}

/// Parses a whitespace-separated input word: `#N` is an extended token,
/// `"…"` a quoted Σ symbol, anything else a bare Σ symbol.
pub fn parse_word(text: &str) -> Result<Vec<Symbol>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let start = cur.here();
        match cur.peek() {
            None => return Ok(out),
            Some('"') => out.push(Symbol::Sigma(cur.quoted()?)),
            Some(_) => {
                while cur.peek().is_some_and(|c| !c.is_whitespace()) {
                    cur.bump();
                }
                let raw = &text[start.start..cur.pos];
                match raw.strip_prefix('#') {
                    Some(digits) if !digits.is_empty() => {
                        let v = digits.parse().map_err(|_| {
                            ParseError::expected(cur.span_from(start), format!("bad extended token `{raw}`"), "`#N`")
                        })?;
                        out.push(Symbol::Ext(v))
                    }
                    _ => out.push(Symbol::Sigma(raw.to_string())),
                }
            }
        }
    }
}

/// Inverse of [`parse_word`].
pub fn serialize_word(word: &[Symbol]) -> String {
    let parts: Vec<String> = word
        .iter()
        .map(|s| match s {
            Symbol::Ext(v) => format!("#{v}"),
            Symbol::Sigma(x) if x.is_empty() || x.starts_with('#') || x.starts_with('"') || x.contains(char::is_whitespace) => {
                quote(x)
            }
            Symbol::Sigma(x) => x.clone(),
        })
        .collect();
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crasp::{accepts, Token};

    #[test]
    fn three_line_program() {
        let p = parse_crasp(r#"P1 := Q_"@"; C1 := count(j<=i, P1); P2 := C1 <= C1"#).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.sigma(), &["@"]);
        assert_eq!(p.ops()[1], Op::Count { filter: 0, rel: LocalRel::Top });
    }

    #[test]
    fn match_with_two_conjuncts() {
        let text = "sigma a b\nA := Q_a\nM := match(j<i, filter A, [(0,1,0), (2,0,-3)])\nO := M <= M\n";
        let p = parse_crasp(text).unwrap();
        match &p.ops()[1] {
            Op::Match(m) => {
                assert!(m.strict);
                assert_eq!(m.filter, Some(0));
                assert_eq!(m.conjuncts, vec![Conjunct::new(0, 1, 0), Conjunct::new(2, 0, -3)]);
            }
            op => panic!("{op:?}"),
        }
        assert_eq!(p.bandwidth(), 2);
        assert_eq!(parse_crasp(&serialize_crasp(&p)).unwrap(), p);
    }

    #[test]
    fn count_output_is_rejected() {
        let e = parse_crasp("A := Q_a\nC := count(j<=i, A)").unwrap_err();
        assert!(e.message.contains("boolean"), "{}", e.message);
        assert_eq!(e.span.line, 2);
    }

    #[test]
    fn sort_and_reference_errors() {
        let e = parse_crasp("A := Q_a\nC := count(j<=i, A)\nN := not C").unwrap_err();
        assert!(e.message.contains("operand `C`"), "{}", e.message);
        assert_eq!(e.span.line, 3);
        let e = parse_crasp("A := not B\nB := Q_a").unwrap_err();
        assert!(e.message.contains("forward reference"));
        let e = parse_crasp("sigma a\nA := Q_b").unwrap_err();
        assert!(e.message.contains("unknown Σ symbol `b`"));
        let e = parse_crasp("A := Q_a\nB := A or A").unwrap_err();
        assert_eq!(e.expected.as_deref(), Some("`and`, `<=`, `+` or `-`"));
    }

    #[test]
    fn offsets_and_quoted_symbols() {
        let text = "sigma \"$\" \"#3\" a\nD := Q_\"$\"\nC := count(j<=i, i=j+2, D)\nO := 1 <= C\n";
        let e = parse_crasp(text).unwrap_err();
        assert!(e.message.contains("unexpected"));
        let text = "sigma \"$\" \"#3\" a\nD := Q_\"$\"\nC := count(j<=i, i=j+2, D)\nI := 1\nO := I <= C\n";
        let p = parse_crasp(text).unwrap();
        let out = accepts(&p, &[Token::Sigma(0), Token::Sigma(2), Token::Sigma(1)]).unwrap();
        assert!(out);
        assert_eq!(parse_crasp(&serialize_crasp(&p)).unwrap(), p);
    }

    #[test]
    fn words_round_trip() {
        let w = parse_word("$ add #3 \"#x\" \"two words\" @").unwrap();
        assert_eq!(w[2], Symbol::Ext(3));
        assert_eq!(w[3], Symbol::sigma("#x"));
        assert_eq!(parse_word(&serialize_word(&w)).unwrap(), w);
    }
}
