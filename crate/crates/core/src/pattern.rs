//! Compact slot patterns with optional and alternation groups.
//!
//! Grammar, per slot (tokens separated by whitespace):
//!
//! ```text
//! slot        := element+
//! element     := literal | "[" literal+ "]" | "{" alt ("|" alt)* "}"
//! alt         := literal+
//! ```
//!
//! Group markers may be written as separate words or glued to the first or
//! last token of a group (`[such]`, `{he`). A literal that would otherwise be
//! read as a marker is escaped with a leading backslash (`\|`, `\[x`).
//! Groups do not nest, and a slot must contain at least one mandatory
//! element so that no expansion is empty.

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Token, TokenSeq, Triple};

/// Default per-pattern expansion cap.
pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpandOptions {
    pub cap: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions {
            cap: DEFAULT_EXPANSION_CAP,
        }
    }
}

impl ExpandOptions {
    pub fn with_cap(cap: usize) -> Self {
        ExpandOptions { cap }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotElement {
    Literal(Token),
    Optional(Vec<Token>),
    Alternation(Vec<Vec<Token>>),
}

impl SlotElement {
    fn variant_count(&self) -> u128 {
        match self {
            SlotElement::Literal(_) => 1,
            SlotElement::Optional(_) => 2,
            SlotElement::Alternation(alts) => alts.len() as u128,
        }
    }

    fn is_mandatory(&self) -> bool {
        !matches!(self, SlotElement::Optional(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SlotPattern {
    elements: Vec<SlotElement>,
}

#[derive(Debug, PartialEq)]
enum Lexeme {
    OpenOptional,
    CloseOptional,
    OpenAlternation,
    Bar,
    CloseAlternation,
    Word(String),
}

fn lex(raw: &str) -> Vec<Lexeme> {
    let mut out = Vec::new();
    for word in raw.split_whitespace() {
        if let Some(rest) = word.strip_prefix('\\') {
            if !rest.is_empty() {
                out.push(Lexeme::Word(rest.to_owned()));
                continue;
            }
        }
        if word == "|" {
            out.push(Lexeme::Bar);
            continue;
        }
        let mut rest = word;
        while let Some(c) = rest.chars().next() {
            match c {
                '[' => out.push(Lexeme::OpenOptional),
                '{' => out.push(Lexeme::OpenAlternation),
                _ => break,
            }
            rest = &rest[1..];
        }
        let mut closers = Vec::new();
        while let Some(c) = rest.chars().last() {
            match c {
                ']' => closers.push(Lexeme::CloseOptional),
                '}' => closers.push(Lexeme::CloseAlternation),
                _ => break,
            }
            rest = &rest[..rest.len() - 1];
        }
        if rest == "|" {
            out.push(Lexeme::Bar);
        } else if !rest.is_empty() {
            out.push(Lexeme::Word(rest.to_owned()));
        }
        out.extend(closers.into_iter().rev());
    }
    out
}

fn needs_escape(surface: &str) -> bool {
    surface == "|"
        || surface.starts_with(['\\', '[', '{'])
        || surface.ends_with([']', '}'])
}

fn write_token(out: &mut String, token: &Token) {
    if needs_escape(token.surface()) {
        out.push('\\');
    }
    out.push_str(token.surface());
}

enum GroupState {
    Top,
    Optional(Vec<Token>),
    Alternation(Vec<Vec<Token>>, Vec<Token>),
}

impl SlotPattern {
    pub fn parse(raw: &str) -> Result<Self> {
        let mut elements = Vec::new();
        let mut state = GroupState::Top;
        for (i, lexeme) in lex(raw).into_iter().enumerate() {
            let pos = i + 1;
            state = match (state, lexeme) {
                (GroupState::Top, Lexeme::Word(w)) => {
                    elements.push(SlotElement::Literal(Token::new(w)?));
                    GroupState::Top
                }
                (GroupState::Optional(mut toks), Lexeme::Word(w)) => {
                    toks.push(Token::new(w)?);
                    GroupState::Optional(toks)
                }
                (GroupState::Alternation(alts, mut cur), Lexeme::Word(w)) => {
                    cur.push(Token::new(w)?);
                    GroupState::Alternation(alts, cur)
                }
                (GroupState::Top, Lexeme::OpenOptional) => GroupState::Optional(Vec::new()),
                (GroupState::Top, Lexeme::OpenAlternation) => {
                    GroupState::Alternation(Vec::new(), Vec::new())
                }
                (GroupState::Optional(toks), Lexeme::CloseOptional) => {
                    if toks.is_empty() {
                        return Err(Error::pattern(pos, "empty optional group"));
                    }
                    elements.push(SlotElement::Optional(toks));
                    GroupState::Top
                }
                (GroupState::Alternation(mut alts, cur), Lexeme::Bar) => {
                    if cur.is_empty() {
                        return Err(Error::pattern(pos, "empty alternative"));
                    }
                    alts.push(cur);
                    GroupState::Alternation(alts, Vec::new())
                }
                (GroupState::Alternation(mut alts, cur), Lexeme::CloseAlternation) => {
                    if cur.is_empty() {
                        return Err(Error::pattern(pos, "empty alternative"));
                    }
                    alts.push(cur);
                    elements.push(SlotElement::Alternation(alts));
                    GroupState::Top
                }
                (GroupState::Top, Lexeme::CloseOptional) => {
                    return Err(Error::pattern(pos, "unmatched \"]\""))
                }
                (GroupState::Top, Lexeme::CloseAlternation) => {
                    return Err(Error::pattern(pos, "unmatched \"}\""))
                }
                (GroupState::Top, Lexeme::Bar) | (GroupState::Optional(_), Lexeme::Bar) => {
                    return Err(Error::pattern(pos, "\"|\" outside an alternation group"))
                }
                (_, Lexeme::OpenOptional) | (_, Lexeme::OpenAlternation) => {
                    return Err(Error::pattern(pos, "groups cannot nest"))
                }
                (GroupState::Optional(_), Lexeme::CloseAlternation) => {
                    return Err(Error::pattern(pos, "\"}\" closes an optional group"))
                }
                (GroupState::Alternation(..), Lexeme::CloseOptional) => {
                    return Err(Error::pattern(pos, "\"]\" closes an alternation group"))
                }
            };
        }
        match state {
            GroupState::Top => {}
            GroupState::Optional(_) => return Err(Error::pattern(0, "unclosed \"[\"")),
            GroupState::Alternation(..) => return Err(Error::pattern(0, "unclosed \"{\"")),
        }
        Self::from_elements(elements)
    }

    pub fn from_elements(elements: Vec<SlotElement>) -> Result<Self> {
        if !elements.iter().any(SlotElement::is_mandatory) {
            return Err(Error::pattern(0, "slot has no mandatory tokens"));
        }
        for el in &elements {
            match el {
                SlotElement::Optional(toks) if toks.is_empty() => {
                    return Err(Error::pattern(0, "empty optional group"))
                }
                SlotElement::Alternation(alts)
                    if alts.is_empty() || alts.iter().any(Vec::is_empty) =>
                {
                    return Err(Error::pattern(0, "empty alternative"))
                }
                _ => {}
            }
        }
        Ok(SlotPattern { elements })
    }

    /// A pattern made only of literal tokens.
    pub fn literal(seq: &TokenSeq) -> Result<Self> {
        Self::from_elements(seq.iter().cloned().map(SlotElement::Literal).collect())
    }

    pub fn elements(&self) -> &[SlotElement] {
        &self.elements
    }

    pub fn optional_groups(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, SlotElement::Optional(_)))
            .count()
    }

    /// Number of assignments before deduplication.
    pub fn assignment_count(&self) -> u128 {
        self.elements
            .iter()
            .map(SlotElement::variant_count)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }

    /// All surface variants, in assignment order, not deduplicated.
    pub fn variants(&self, keep_optionals: bool) -> Vec<TokenSeq> {
        let mut partials: Vec<Vec<Token>> = vec![Vec::new()];
        for el in &self.elements {
            partials = match el {
                SlotElement::Literal(tok) => partials
                    .into_iter()
                    .map(|mut p| {
                        p.push(tok.clone());
                        p
                    })
                    .collect(),
                SlotElement::Optional(toks) => {
                    if keep_optionals {
                        partials
                            .into_iter()
                            .flat_map(|p| {
                                let mut with = p.clone();
                                with.extend(toks.iter().cloned());
                                [with, p]
                            })
                            .collect()
                    } else {
                        partials
                    }
                }
                SlotElement::Alternation(alts) => partials
                    .into_iter()
                    .flat_map(|p| {
                        alts.iter().map(move |alt| {
                            let mut next = p.clone();
                            next.extend(alt.iter().cloned());
                            next
                        })
                    })
                    .collect(),
            };
        }
        partials.into_iter().map(TokenSeq::new).collect()
    }
}

impl fmt::Display for SlotPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for el in &self.elements {
            if !out.is_empty() {
                out.push(' ');
            }
            match el {
                SlotElement::Literal(tok) => write_token(&mut out, tok),
                SlotElement::Optional(toks) => {
                    out.push('[');
                    for tok in toks {
                        out.push(' ');
                        write_token(&mut out, tok);
                    }
                    out.push_str(" ]");
                }
                SlotElement::Alternation(alts) => {
                    out.push('{');
                    for (i, alt) in alts.iter().enumerate() {
                        if i > 0 {
                            out.push_str(" |");
                        }
                        for tok in alt {
                            out.push(' ');
                            write_token(&mut out, tok);
                        }
                    }
                    out.push_str(" }");
                }
            }
        }
        f.write_str(&out)
    }
}

impl From<SlotPattern> for String {
    fn from(p: SlotPattern) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for SlotPattern {
    type Error = Error;

    fn try_from(raw: String) -> Result<Self> {
        SlotPattern::parse(&raw)
    }
}

/// Three slot patterns plus the entity-cleanliness flag used by the entity
/// facet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: SlotPattern,
    pub predicate: SlotPattern,
    pub object: SlotPattern,
    #[serde(default = "default_true")]
    pub entity_clean: bool,
}

fn default_true() -> bool {
    true
}

impl TriplePattern {
    pub fn new(
        subject: SlotPattern,
        predicate: SlotPattern,
        object: SlotPattern,
        entity_clean: bool,
    ) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
            entity_clean,
        }
    }

    pub fn parse(subject: &str, predicate: &str, object: &str, entity_clean: bool) -> Result<Self> {
        Ok(TriplePattern::new(
            SlotPattern::parse(subject)?,
            SlotPattern::parse(predicate)?,
            SlotPattern::parse(object)?,
            entity_clean,
        ))
    }

    /// A pattern that expands to exactly one triple.
    pub fn from_triple(triple: &Triple) -> Result<Self> {
        Ok(TriplePattern::new(
            SlotPattern::literal(&triple.subject)?,
            SlotPattern::literal(&triple.predicate)?,
            SlotPattern::literal(&triple.object)?,
            true,
        ))
    }

    pub fn slots(&self) -> [&SlotPattern; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    /// Upper bound on the expansion size: 2 per optional group times the
    /// alternative count of each alternation group.
    pub fn assignment_count(&self) -> u128 {
        self.slots()
            .iter()
            .map(|s| s.assignment_count())
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }

    fn product(&self, keep_optionals: bool, opts: ExpandOptions) -> Result<IndexSet<Triple>> {
        let bound = if keep_optionals {
            self.assignment_count()
        } else {
            self.slots()
                .iter()
                .map(|s| {
                    s.elements()
                        .iter()
                        .filter(|e| e.is_mandatory())
                        .map(SlotElement::variant_count)
                        .fold(1u128, |a, n| a.saturating_mul(n))
                })
                .fold(1u128, |a, n| a.saturating_mul(n))
        };
        if bound > opts.cap as u128 {
            return Err(Error::Capacity {
                bound,
                cap: opts.cap,
            });
        }
        let subjects = self.subject.variants(keep_optionals);
        let predicates = self.predicate.variants(keep_optionals);
        let objects = self.object.variants(keep_optionals);
        let mut out = IndexSet::new();
        for s in &subjects {
            for p in &predicates {
                for o in &objects {
                    out.insert(Triple::new(s.clone(), p.clone(), o.clone())?);
                }
            }
        }
        Ok(out)
    }

    /// Every concrete triple: each optional group present or absent, each
    /// alternation group at each alternative. Deduplicated, first-seen order.
    pub fn expand(&self, opts: ExpandOptions) -> Result<IndexSet<Triple>> {
        self.product(true, opts)
    }

    /// Expansion with every optional group dropped.
    pub fn minimal_forms(&self, opts: ExpandOptions) -> Result<IndexSet<Triple>> {
        self.product(false, opts)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(\"{}\"; \"{}\"; \"{}\")", self.subject, self.predicate, self.object)
    }
}
