//! Propositional language over atomic identifiers, sequents, and their
//! concrete syntax.
//!
//! Grammar (loosest binding first):
//!
//! ```text
//! sequent := list "|-" list
//! list    := ε | formula ("," formula)*
//! formula := disj ("->" formula)?          right-associative
//! disj    := conj ("|" conj)*              left-associative
//! conj    := unary ("&" unary)*            left-associative
//! unary   := "~" unary | atom | "(" formula ")"
//! atom    := [A-Za-z_][A-Za-z0-9_]*
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("missing turnstile `|-`")]
    MissingTurnstile,
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }

    /// Byte offset of a syntax error, if any.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

/// Name of an atomic proposition. Case-sensitive, compared by exact equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(String);

impl AtomId {
    pub fn new(name: impl Into<String>) -> Result<Self, ParseError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ParseError::EmptyInput);
        }
        for (i, c) in name.char_indices() {
            let ok = if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                return Err(ParseError::syntax(
                    i,
                    format!("invalid character {c:?} in atom"),
                ));
            }
        }
        Ok(AtomId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for AtomId {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AtomId::new(s)
    }
}

impl Serialize for AtomId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for AtomId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        AtomId::new(s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(AtomId),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Panics if `name` is not a valid atom identifier.
    pub fn atom(name: &str) -> Self {
        Formula::Atom(AtomId::new(name).expect("invalid atom name"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    pub fn as_atom(&self) -> Option<&AtomId> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Number of connective occurrences.
    pub fn connectives(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Neg(a) => 1 + a.connectives(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                1 + a.connectives() + b.connectives()
            }
        }
    }

    pub fn subformulas(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Neg(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Neg(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Neg(_) => 4,
            Formula::Atom(_) => 5,
        }
    }

    fn write_with(&self, out: &mut String) {
        fn child(out: &mut String, f: &Formula, parens: bool) {
            if parens {
                out.push('(');
                f.write_with(out);
                out.push(')');
            } else {
                f.write_with(out);
            }
        }
        match self {
            Formula::Atom(a) => out.push_str(a.as_str()),
            Formula::Neg(a) => {
                out.push('~');
                child(out, a, a.precedence() < 4);
            }
            Formula::And(a, b) => {
                child(out, a, a.precedence() < 3);
                out.push_str(" & ");
                child(out, b, b.precedence() <= 3);
            }
            Formula::Or(a, b) => {
                child(out, a, a.precedence() < 2);
                out.push_str(" | ");
                child(out, b, b.precedence() <= 2);
            }
            Formula::Imp(a, b) => {
                child(out, a, a.precedence() <= 1);
                out.push_str(" -> ");
                child(out, b, false);
            }
        }
    }
}

/// Canonical rendering with minimal parentheses; inverse of [`parse_formula`].
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    f.write_with(&mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_formula(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Antecedent,
    Succedent,
}

/// A pair of finite formula sets `Γ |- Δ`. Either side may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedent: BTreeSet<Formula>,
    pub succedent: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(
        antecedent: impl IntoIterator<Item = Formula>,
        succedent: impl IntoIterator<Item = Formula>,
    ) -> Self {
        Sequent {
            antecedent: antecedent.into_iter().collect(),
            succedent: succedent.into_iter().collect(),
        }
    }

    /// Sequent over atoms only.
    pub fn atomic<'a>(
        lhs: impl IntoIterator<Item = &'a AtomId>,
        rhs: impl IntoIterator<Item = &'a AtomId>,
    ) -> Self {
        Sequent::new(
            lhs.into_iter().cloned().map(Formula::Atom),
            rhs.into_iter().cloned().map(Formula::Atom),
        )
    }

    pub fn side(&self, side: Side) -> &BTreeSet<Formula> {
        match side {
            Side::Antecedent => &self.antecedent,
            Side::Succedent => &self.succedent,
        }
    }

    pub fn is_atomic(&self) -> bool {
        self.antecedent
            .iter()
            .chain(&self.succedent)
            .all(Formula::is_atom)
    }

    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        for f in self.antecedent.iter().chain(&self.succedent) {
            f.collect_atoms(&mut out);
        }
        out
    }

    pub fn connectives(&self) -> usize {
        self.antecedent
            .iter()
            .chain(&self.succedent)
            .map(Formula::connectives)
            .sum()
    }

    /// Sides rendered and sorted by their rendered strings.
    pub fn sorted_rendered(&self) -> (Vec<String>, Vec<String>) {
        let sort = |set: &BTreeSet<Formula>| {
            let mut v: Vec<String> = set.iter().map(render).collect();
            v.sort();
            v
        };
        (sort(&self.antecedent), sort(&self.succedent))
    }

    /// Canonical text form; doubles as the memo key.
    pub fn canonical(&self) -> String {
        let (lhs, rhs) = self.sorted_rendered();
        let mut out = lhs.join(", ");
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str("|-");
        if !rhs.is_empty() {
            out.push(' ');
            out.push_str(&rhs.join(", "));
        }
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for Sequent {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}

impl Serialize for Sequent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for Sequent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_sequent(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Not,
    And,
    Or,
    Imp,
    LParen,
    RParen,
    Comma,
    Turnstile,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom `{a}`"),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Turnstile => "`|-`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'|' if bytes.get(i + 1) == Some(&b'-') => {
                i += 1;
                Tok::Turnstile
            }
            b'|' => Tok::Or,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Imp
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Atom(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(
                    i,
                    format!("unexpected character {ch:?}"),
                ));
            }
        };
        toks.push((start, tok));
        i += 1;
    }
    Ok(toks)
}

struct Parser<'t> {
    toks: &'t [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::syntax(
                self.offset(),
                format!("expected {wanted}, found {}", t.describe()),
            ),
            None => ParseError::syntax(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Imp) {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::Atom(name)) => {
                let f = Formula::Atom(AtomId(name.clone()));
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.pos += 1;
                Ok(f)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn list(&mut self) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if matches!(self.peek(), None | Some(Tok::Turnstile)) {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let toks = lex(text)?;
    if !toks.iter().any(|(_, t)| *t == Tok::Turnstile) {
        if text.trim().is_empty() {
            return Err(ParseError::EmptyInput);
        }
        return Err(ParseError::MissingTurnstile);
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let lhs = p.list()?;
    if p.peek() != Some(&Tok::Turnstile) {
        return Err(p.unexpected("`,` or `|-`"));
    }
    p.pos += 1;
    let rhs = p.list()?;
    if p.peek().is_some() {
        return Err(p.unexpected("`,` or end of input"));
    }
    Ok(Sequent::new(lhs, rhs))
}
