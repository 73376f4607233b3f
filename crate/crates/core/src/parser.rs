//! Text syntax for formulas and sequents.
//!
//! ```text
//! disj   := conj ("|" conj)*
//! conj   := factor ("&" factor)*
//! factor := prefix* (atom | "(" disj ")")
//! prefix := "un" | "im" | "oun" | "oim"
//! atom   := identifier | "top" | "bot"
//! ```
//!
//! `⊤ ⊥ ∧ ∨` are accepted as input aliases. Printing always produces the
//! ASCII form with minimal parentheses, and `parse(print(f)) == f`.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Formula, Sequent};

/// Byte range `[start, end)` into the parsed text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into() }
    }
}

const RESERVED: [&str; 6] = ["top", "bot", "un", "im", "oun", "oim"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bot,
    And,
    Or,
    Un,
    Im,
    Con,
    Det,
    LParen,
    RParen,
    Comma,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Top => "`top`".into(),
            Tok::Bot => "`bot`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Un => "`un`".into(),
            Tok::Im => "`im`".into(),
            Tok::Con => "`oun`".into(),
            Tok::Det => "`oim`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`=>`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &text[start..end];
            let tok = match word {
                "top" => Tok::Top,
                "bot" => Tok::Bot,
                "un" => Tok::Un,
                "im" => Tok::Im,
                "oun" => Tok::Con,
                "oim" => Tok::Det,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, SourceSpan::new(start, end)));
            continue;
        }
        chars.next();
        let end = start + c.len_utf8();
        let tok = match c {
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '⊤' => Tok::Top,
            '⊥' => Tok::Bot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => {
                if let Some(&(_, '>')) = chars.peek() {
                    chars.next();
                    out.push((Tok::Arrow, SourceSpan::new(start, end + 1)));
                    continue;
                }
                return Err(ParseError::new(SourceSpan::new(start, end), "expected `=>`"));
            }
            _ => {
                return Err(ParseError::new(
                    SourceSpan::new(start, end),
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        out.push((tok, SourceSpan::new(start, end)));
    }
    Ok(out)
}

struct Parser<'t> {
    toks: &'t [(Tok, SourceSpan)],
    pos: usize,
    len: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span_here(&self) -> SourceSpan {
        match self.toks.get(self.pos) {
            Some((_, s)) => *s,
            None => SourceSpan::new(self.len, self.len),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((t, s)) => ParseError::new(*s, format!("expected {wanted}, found {}", t.describe())),
            None => ParseError::new(self.span_here(), format!("expected {wanted}, found end of input")),
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.conj()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Un) => Formula::un,
            Some(Tok::Im) => Formula::im,
            Some(Tok::Con) => Formula::con,
            Some(Tok::Det) => Formula::det,
            Some(Tok::Top) => {
                self.pos += 1;
                return Ok(Formula::Top);
            }
            Some(Tok::Bot) => {
                self.pos += 1;
                return Ok(Formula::Bot);
            }
            Some(Tok::Ident(name)) => {
                let f = Formula::var(name);
                self.pos += 1;
                return Ok(f);
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.disj()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.pos += 1;
                return Ok(inner);
            }
            _ => return Err(self.unexpected("a formula")),
        };
        self.pos += 1;
        Ok(wrap(self.factor()?))
    }

    fn formula_list(&mut self, stop: Option<&Tok>) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        loop {
            out.push(self.disj()?);
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, len: text.len() };
    let f = p.disj()?;
    if p.pos != toks.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parse `a, b => c, d`. Either side may be empty; duplicates collapse.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, len: text.len() };
    let left = p.formula_list(Some(&Tok::Arrow))?;
    match p.peek() {
        Some(Tok::Arrow) => p.pos += 1,
        None => return Err(ParseError::new(p.span_here(), "missing `=>`")),
        Some(_) => return Err(p.unexpected("`,` or `=>`")),
    }
    let right = p.formula_list(None)?;
    if p.pos != toks.len() {
        return Err(p.unexpected("`,` or end of input"));
    }
    Ok(Sequent::new(left, right))
}

/// Whether `name` can be used as a variable identifier.
pub fn is_valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name)
}

// Binding strength: 0 = disjunction, 1 = conjunction, 2 = prefix/atom.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        _ => 2,
    }
}

fn write_at(f: &Formula, min_level: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min_level {
        out.write_str("(")?;
        write_at(f, 0, out)?;
        return out.write_str(")");
    }
    match f {
        Formula::Var(name) => out.write_str(name),
        Formula::Top => out.write_str("top"),
        Formula::Bot => out.write_str("bot"),
        Formula::And(a, b) => {
            write_at(a, 1, out)?;
            out.write_str(" & ")?;
            write_at(b, 2, out)
        }
        Formula::Or(a, b) => {
            write_at(a, 0, out)?;
            out.write_str(" | ")?;
            write_at(b, 1, out)
        }
        Formula::Un(a) | Formula::Im(a) | Formula::Con(a) | Formula::Det(a) => {
            let kw = f.connective().expect("compound").keyword();
            write!(out, "{kw} ")?;
            write_at(a, 2, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

fn join(side: &std::collections::BTreeSet<Formula>) -> String {
    side.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.left.is_empty(), self.right.is_empty()) {
            (true, true) => f.write_str("=>"),
            (true, false) => write!(f, "=> {}", join(&self.right)),
            (false, true) => write!(f, "{} =>", join(&self.left)),
            (false, false) => write!(f, "{} => {}", join(&self.left), join(&self.right)),
        }
    }
}

pub fn print_sequent(s: &Sequent) -> String {
    s.to_string()
}
