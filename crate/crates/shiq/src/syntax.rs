//! Text format for knowledge bases (`.shiq`) and queries (`.cq`).
//!
//! ```text
//! # comment
//! trans R.
//! role R <= (inv S).
//! axiom A <= (some R (and B (not C))).
//! distinguished B.
//! assert (atleast 2 R B)(a).
//! assert R(a, b).
//! assert a != b.
//! ```
//!
//! Queries are comma-separated atoms, `?`-prefixed names are variables:
//! `R(a, ?y), B(?y)`.

use std::fmt::{self, Write as _};

use shiq_core::kb::Location;
use shiq_core::{
    nnf, Assertion, Concept, ConceptExpr, KbBuilder, KnowledgeBase, Query, QueryAtom, Role, Term, ValidationReport,
};
use thiserror::Error;

/// A region of the input. Lines and columns are 1-based, offsets are byte
/// offsets with `start <= end <= input.len()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Arity,
    Validation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub message: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Dot,
    Comma,
    Le,
    Ne,
    Ident(String),
    Var(String),
    Num(u32),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Comma => f.write_str("','"),
            Tok::Le => f.write_str("'<='"),
            Tok::Ne => f.write_str("'!='"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Var(s) => write!(f, "'?{s}'"),
            Tok::Num(n) => write!(f, "'{n}'"),
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

struct Lexer<'a> {
    src: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(src.match_indices('\n').map(|(i, _)| i + 1));
        Lexer { src, line_starts }
    }

    fn span(&self, start: usize, end: usize) -> SourceSpan {
        let line = self.line_starts.partition_point(|&s| s <= start);
        let column = self.src[self.line_starts[line - 1]..start].chars().count() + 1;
        SourceSpan { line, column, start, end }
    }

    fn tokens(&self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        let mut it = self.src.char_indices().peekable();
        while let Some(&(i, c)) = it.peek() {
            if c.is_whitespace() {
                it.next();
                continue;
            }
            if c == '#' {
                while it.next_if(|&(_, c)| c != '\n').is_some() {}
                continue;
            }
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '.' => Some(Tok::Dot),
                ',' => Some(Tok::Comma),
                _ => None,
            };
            if let Some(t) = single {
                it.next();
                out.push((t, self.span(i, i + 1)));
                continue;
            }
            if c == '<' || c == '!' {
                it.next();
                if it.next_if(|&(_, d)| d == '=').is_some() {
                    out.push((if c == '<' { Tok::Le } else { Tok::Ne }, self.span(i, i + 2)));
                    continue;
                }
                return Err(self.error(ErrorKind::Lexical, format!("expected '=' after '{c}'"), i, i + 1));
            }
            if c == '?' {
                it.next();
                let start = i + 1;
                let mut end = start;
                while let Some((j, d)) = it.next_if(|&(_, d)| is_name_char(d)) {
                    end = j + d.len_utf8();
                }
                if end == start {
                    return Err(self.error(ErrorKind::Lexical, "expected a variable name after '?'".into(), i, i + 1));
                }
                out.push((Tok::Var(self.src[start..end].into()), self.span(i, end)));
                continue;
            }
            if is_name_char(c) {
                let mut end = i;
                while let Some((j, d)) = it.next_if(|&(_, d)| is_name_char(d)) {
                    end = j + d.len_utf8();
                }
                let text = &self.src[i..end];
                let tok = if text.bytes().all(|b| b.is_ascii_digit()) {
                    Tok::Num(text.parse().map_err(|_| {
                        self.error(ErrorKind::Lexical, format!("number {text} is too large"), i, end)
                    })?)
                } else {
                    Tok::Ident(text.into())
                };
                out.push((tok, self.span(i, end)));
                continue;
            }
            return Err(self.error(ErrorKind::Lexical, format!("unexpected character {c:?}"), i, i + c.len_utf8()));
        }
        Ok(out)
    }

    fn error(&self, kind: ErrorKind, message: String, start: usize, end: usize) -> ParseError {
        ParseError { kind, message, span: self.span(start, end) }
    }
}

struct Parser<'a> {
    lexer: &'a Lexer<'a>,
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser<'_> {
    fn eof_span(&self) -> SourceSpan {
        let n = self.lexer.src.len();
        self.lexer.span(n, n)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map_or_else(|| self.eof_span(), |(_, s)| *s)
    }

    fn prev_end(&self) -> usize {
        self.pos.checked_sub(1).map_or(0, |p| self.toks[p].1.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { kind: ErrorKind::Syntax, message: message.into(), span: self.span() }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    /// `R` or `(inv R)`, nested inversions cancel.
    fn role(&mut self) -> Result<Role, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            match self.ident("'inv'")?.as_str() {
                "inv" => {}
                other => {
                    self.pos -= 1;
                    return Err(self.error(format!("expected 'inv', found '{other}'")));
                }
            }
            let inner = self.role()?;
            self.expect(Tok::RParen)?;
            Ok(inner.inverse())
        } else {
            Ok(Role::new(self.ident("a role name")?))
        }
    }

    fn concept(&mut self) -> Result<ConceptExpr, ParseError> {
        if self.peek() != Some(&Tok::LParen) {
            return Ok(ConceptExpr::atom(self.ident("a concept")?));
        }
        self.pos += 1;
        let op_span = self.span();
        let op = self.ident("a concept constructor")?;
        let c = match op.as_str() {
            "and" | "or" => {
                let mut parts = vec![self.concept()?, self.concept()?];
                while self.peek() != Some(&Tok::RParen) && self.peek().is_some() {
                    parts.push(self.concept()?);
                }
                let mut it = parts.into_iter().rev();
                let last = it.next().expect("at least two operands");
                it.fold(last, |acc, c| {
                    if op == "and" {
                        ConceptExpr::And(Box::new(c), Box::new(acc))
                    } else {
                        ConceptExpr::Or(Box::new(c), Box::new(acc))
                    }
                })
            }
            "not" => ConceptExpr::not(self.concept()?),
            "all" | "some" => {
                let r = self.role()?;
                let c = Box::new(self.concept()?);
                if op == "all" {
                    ConceptExpr::Forall(r, c)
                } else {
                    ConceptExpr::Exists(r, c)
                }
            }
            "atleast" | "atmost" => {
                let n = self.number()?;
                let r = self.role()?;
                let c = Box::new(self.concept()?);
                if op == "atleast" {
                    ConceptExpr::AtLeast(n, r, c)
                } else {
                    ConceptExpr::AtMost(n, r, c)
                }
            }
            other => {
                return Err(ParseError {
                    kind: ErrorKind::Syntax,
                    message: format!("unknown concept constructor '{other}'"),
                    span: op_span,
                })
            }
        };
        self.expect(Tok::RParen)?;
        Ok(c)
    }
}

/// Byte ranges of the statements a [`KbBuilder`] entry came from.
#[derive(Debug, Clone, Default)]
pub struct StatementSpans {
    pub assertions: Vec<SourceSpan>,
    pub axioms: Vec<SourceSpan>,
    pub role_inclusions: Vec<SourceSpan>,
}

/// Parses a knowledge base without validating it.
pub fn parse_kb_unvalidated(text: &str) -> Result<(KbBuilder, StatementSpans), ParseError> {
    let lexer = Lexer::new(text);
    let mut p = Parser { toks: lexer.tokens()?, lexer: &lexer, pos: 0 };
    let mut kb = KbBuilder::new();
    let mut spans = StatementSpans::default();
    while p.peek().is_some() {
        let start = p.span();
        let keyword = p.ident("a statement keyword")?;
        match keyword.as_str() {
            "trans" => kb.transitive.push(p.ident("a role name")?),
            "role" => {
                let sub = p.role()?;
                p.expect(Tok::Le)?;
                let sup = p.role()?;
                kb.role_inclusions.push((sub, sup));
            }
            "axiom" => {
                let sub = nnf(&p.concept()?);
                p.expect(Tok::Le)?;
                let sup = nnf(&p.concept()?);
                kb.axioms.push(shiq_core::Gci::new(sub, sup));
            }
            "distinguished" => kb.distinguished.push(p.ident("a concept name")?),
            "assert" => kb.assertions.push(assertion(&mut p)?),
            other => {
                p.pos -= 1;
                return Err(p.error(format!("unknown statement '{other}'")));
            }
        }
        p.expect(Tok::Dot)?;
        let span = lexer.span(start.start, p.prev_end());
        match keyword.as_str() {
            "role" => spans.role_inclusions.push(span),
            "axiom" => spans.axioms.push(span),
            "assert" => spans.assertions.push(span),
            _ => {}
        }
    }
    Ok((kb, spans))
}

fn assertion(p: &mut Parser<'_>) -> Result<Assertion, ParseError> {
    if let (Some(Tok::Ident(a)), Some(Tok::Ne)) = (p.peek(), p.peek_at(1)) {
        let a = a.clone();
        p.pos += 2;
        let b = p.ident("an individual name")?;
        return Ok(Assertion::Distinct(a, b));
    }
    // A role head is followed by two arguments, a concept head by one.
    let head_start = p.pos;
    if let Ok(role) = p.role() {
        if p.peek() == Some(&Tok::LParen) && p.peek_at(2) == Some(&Tok::Comma) {
            p.pos += 1;
            let a = p.ident("an individual name")?;
            p.expect(Tok::Comma)?;
            let b = p.ident("an individual name")?;
            p.expect(Tok::RParen)?;
            return Ok(Assertion::Role(role, a, b));
        }
    }
    p.pos = head_start;
    let head = p.concept()?;
    p.expect(Tok::LParen)?;
    let a = p.ident("an individual name")?;
    if p.peek() == Some(&Tok::Comma) {
        return Err(ParseError {
            kind: ErrorKind::Arity,
            message: "a binary assertion needs a role, found a concept".into(),
            span: p.span(),
        });
    }
    p.expect(Tok::RParen)?;
    Ok(Assertion::Concept(nnf(&head), a))
}

/// Parses and validates a knowledge base. Concepts are stored in NNF.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    let (builder, spans) = parse_kb_unvalidated(text)?;
    let report = builder.validate();
    if let Some(issue) = report.issues.first() {
        return Err(validation_error(text, &spans, &report, issue.location));
    }
    Ok(builder.build().expect("validated"))
}

/// Converts the first validation issue into a located error.
pub fn validation_error(text: &str, spans: &StatementSpans, report: &ValidationReport, at: Location) -> ParseError {
    let span = locate(text, spans, at);
    ParseError { kind: ErrorKind::Validation, message: report.issues[0].to_string(), span }
}

/// Source span of a validation location; the end of input when the issue
/// concerns the whole knowledge base.
pub fn locate(text: &str, spans: &StatementSpans, at: Location) -> SourceSpan {
    let found = match at {
        Location::Assertion(i) => spans.assertions.get(i),
        Location::Axiom(i) => spans.axioms.get(i),
        Location::RoleInclusion(i) => spans.role_inclusions.get(i),
        Location::KnowledgeBase => None,
    };
    found.copied().unwrap_or_else(|| {
        let lexer = Lexer::new(text);
        lexer.span(text.len(), text.len())
    })
}

/// Parses a Boolean conjunctive query. A trailing `.` is accepted.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let lexer = Lexer::new(text);
    let mut p = Parser { toks: lexer.tokens()?, lexer: &lexer, pos: 0 };
    let mut atoms = Vec::new();
    loop {
        let start = p.span();
        let name = p.ident("a predicate name")?;
        p.expect(Tok::LParen)?;
        let mut args = vec![term(&mut p)?];
        while p.peek() == Some(&Tok::Comma) {
            p.pos += 1;
            args.push(term(&mut p)?);
        }
        p.expect(Tok::RParen)?;
        let atom = match <[Term; 1]>::try_from(args) {
            Ok([t]) => QueryAtom::concept(name, t),
            Err(args) => match <[Term; 2]>::try_from(args) {
                Ok([a, b]) => QueryAtom::role(name, a, b),
                Err(args) => {
                    return Err(ParseError {
                        kind: ErrorKind::Arity,
                        message: format!("predicate {name} applied to {} arguments; expected 1 or 2", args.len()),
                        span: lexer.span(start.start, p.prev_end()),
                    })
                }
            },
        };
        atoms.push(atom);
        match p.next() {
            Some(Tok::Comma) => continue,
            Some(Tok::Dot) if p.peek().is_none() => break,
            None => break,
            Some(_) => {
                p.pos -= 1;
                return Err(p.unexpected("',' or end of query"));
            }
        }
    }
    Query::new(atoms).map_err(|e| ParseError { kind: ErrorKind::Syntax, message: e.to_string(), span: p.eof_span() })
}

/// Parses a query and checks predicate arities against `kb`: concept names
/// take one argument, role names two.
pub fn parse_query_for(text: &str, kb: &KnowledgeBase) -> Result<Query, ParseError> {
    let q = parse_query(text)?;
    let roles = kb.role_names();
    let concepts = kb.concept_names();
    for atom in q.atoms() {
        let bad = match atom {
            QueryAtom::Concept { name, .. } if roles.contains(name) => Some((name, "role", 2, 1)),
            QueryAtom::Role { name, .. } if concepts.contains(name) && !roles.contains(name) => {
                Some((name, "concept", 1, 2))
            }
            _ => None,
        };
        if let Some((name, what, want, got)) = bad {
            let lexer = Lexer::new(text);
            let at = text.find(name.as_str()).unwrap_or(0);
            return Err(ParseError {
                kind: ErrorKind::Arity,
                message: format!("{what} {name} takes {want} argument(s), found {got}"),
                span: lexer.span(at, at + name.len()),
            });
        }
    }
    Ok(q)
}

fn term(p: &mut Parser<'_>) -> Result<Term, ParseError> {
    match p.next() {
        Some(Tok::Var(v)) => Ok(Term::Var(v)),
        Some(Tok::Ident(c)) => Ok(Term::Const(c)),
        _ => {
            p.pos = p.pos.saturating_sub(1);
            Err(p.unexpected("a variable or a constant"))
        }
    }
}

/// Canonical text of a knowledge base. `parse_kb(&render_kb(kb))` equals `kb`.
pub fn render_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for t in kb.rbox().transitive() {
        let _ = writeln!(out, "trans {t}.");
    }
    for (s, t) in kb.rbox().inclusions() {
        let _ = writeln!(out, "role {s} <= {t}.");
    }
    for d in kb.distinguished() {
        let _ = writeln!(out, "distinguished {d}.");
    }
    for g in kb.tbox() {
        let _ = writeln!(out, "axiom {} <= {}.", g.sub, g.sup);
    }
    for a in kb.abox() {
        let _ = match a {
            Assertion::Concept(c, x) => writeln!(out, "assert {c}({x})."),
            Assertion::Role(r, x, y) => writeln!(out, "assert {r}({x}, {y})."),
            Assertion::Distinct(x, y) => writeln!(out, "assert {x} != {y}."),
        };
    }
    out
}

pub fn render_query(q: &Query) -> String {
    q.to_string()
}

/// Concept text in the same syntax.
pub fn render_concept(c: &Concept) -> String {
    c.to_string()
}
