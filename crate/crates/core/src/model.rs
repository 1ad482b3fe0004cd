//! Shared domain types: tokens, token sequences, triples, extractions and
//! the gold corpus of fact synsets.
//!
//! All comparisons go through a token's comparison key, which is the
//! case-folded surface form. Surfaces are kept for display and export.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::TriplePattern;

/// A single whitespace-free token.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Token {
    surface: String,
    key: String,
}

impl Token {
    /// Builds a token, rejecting empty surfaces and surfaces containing
    /// whitespace.
    pub fn new(surface: impl Into<String>) -> Result<Self> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(surface));
        }
        let key = surface.to_lowercase();
        Ok(Token { surface, key })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    /// Case-folded comparison key.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Token {}

impl Hash for Token {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

impl From<Token> for String {
    fn from(token: Token) -> String {
        token.surface
    }
}

impl TryFrom<String> for Token {
    type Error = Error;

    fn try_from(surface: String) -> Result<Self> {
        Token::new(surface)
    }
}

/// Ordered token sequence; equality and hashing are positional over
/// comparison keys.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", from = "String")]
pub struct TokenSeq(Vec<Token>);

impl TokenSeq {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.0.iter()
    }

    /// Space-joined surfaces.
    pub fn join(&self) -> String {
        let mut out = String::new();
        for (i, tok) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(tok.surface());
        }
        out
    }

    /// Concatenation of several sequences, in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a TokenSeq>) -> TokenSeq {
        TokenSeq(parts.into_iter().flat_map(|p| p.0.iter().cloned()).collect())
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join())
    }
}

impl From<TokenSeq> for String {
    fn from(seq: TokenSeq) -> String {
        seq.join()
    }
}

impl From<String> for TokenSeq {
    fn from(raw: String) -> TokenSeq {
        normalize(&raw)
    }
}

impl From<&str> for TokenSeq {
    fn from(raw: &str) -> TokenSeq {
        normalize(raw)
    }
}

impl FromIterator<Token> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Splits on runs of whitespace. Never fails; empty input gives an empty
/// sequence.
pub fn normalize(raw: &str) -> TokenSeq {
    raw.split_whitespace()
        .map(|s| Token {
            surface: s.to_owned(),
            key: s.to_lowercase(),
        })
        .collect()
}

/// Positional equality of comparison keys.
pub fn seq_equal(a: &TokenSeq, b: &TokenSeq) -> bool {
    a == b
}

/// True when every token of the triple occurs in `sentence`, counting
/// multiplicity over the whole triple.
pub fn is_explicit(triple: &Triple, sentence: &TokenSeq) -> bool {
    let mut available: HashMap<&str, usize> = HashMap::new();
    for tok in sentence {
        *available.entry(tok.key()).or_default() += 1;
    }
    triple.slots().into_iter().flatten().all(|tok| {
        match available.get_mut(tok.key()) {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        }
    })
}

/// True when every token of the triple occurs somewhere in `sentence`.
/// Repeats are allowed, so a coreferent mention may fill two slots.
pub fn uses_sentence_tokens(triple: &Triple, sentence: &TokenSeq) -> bool {
    let vocab: HashSet<&str> = sentence.iter().map(Token::key).collect();
    triple.slots().into_iter().flatten().all(|tok| vocab.contains(tok.key()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    pub text: String,
    pub tokens: TokenSeq,
}

impl Sentence {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = normalize(&text);
        Sentence {
            id: id.into(),
            text,
            tokens,
        }
    }
}

/// A (subject; predicate; object) triple with non-empty slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: TokenSeq,
    pub predicate: TokenSeq,
    pub object: TokenSeq,
}

impl Triple {
    pub fn new(subject: TokenSeq, predicate: TokenSeq, object: TokenSeq) -> Result<Self> {
        for (slot, seq) in [
            (Slot::Subject, &subject),
            (Slot::Predicate, &predicate),
            (Slot::Object, &object),
        ] {
            if seq.is_empty() {
                return Err(Error::EmptySlot(slot));
            }
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// Convenience constructor from three raw strings.
    pub fn parse(subject: &str, predicate: &str, object: &str) -> Result<Self> {
        Triple::new(normalize(subject), normalize(predicate), normalize(object))
    }

    pub fn slots(&self) -> [&TokenSeq; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    /// Subject, predicate and object concatenated with no separator.
    pub fn concatenated(&self) -> TokenSeq {
        TokenSeq::concat(self.slots())
    }

    pub fn token_count(&self) -> usize {
        self.slots().iter().map(|s| s.len()).sum()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(\"{}\"; \"{}\"; \"{}\")",
            self.subject, self.predicate, self.object
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Subject,
    Predicate,
    Object,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Subject, Slot::Predicate, Slot::Object];

    pub fn name(self) -> &'static str {
        match self {
            Slot::Subject => "subject",
            Slot::Predicate => "predicate",
            Slot::Object => "object",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One system output triple bound to a sentence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub sentence_id: String,
    pub triple: Triple,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl Extraction {
    pub fn new(sentence_id: impl Into<String>, triple: Triple) -> Self {
        Extraction {
            sentence_id: sentence_id.into(),
            triple,
            confidence: None,
        }
    }
}

/// A cluster of patterns that all express the same fact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactSynset {
    pub id: String,
    pub sentence_id: String,
    pub patterns: Vec<TriplePattern>,
}

/// Sentences plus their fact synsets.
///
/// Synsets are kept grouped by sentence, in sentence order, and in
/// insertion order within a sentence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldCorpus {
    sentences: IndexMap<String, Sentence>,
    synsets: Vec<FactSynset>,
}

impl GoldCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sentences(&self) -> impl ExactSizeIterator<Item = &Sentence> {
        self.sentences.values()
    }

    pub fn sentence(&self, id: &str) -> Option<&Sentence> {
        self.sentences.get(id)
    }

    pub fn sentence_ids(&self) -> impl Iterator<Item = &str> {
        self.sentences.keys().map(String::as_str)
    }

    pub fn synsets(&self) -> &[FactSynset] {
        &self.synsets
    }

    pub fn synset(&self, id: &str) -> Option<&FactSynset> {
        self.synsets.iter().find(|s| s.id == id)
    }

    pub fn synsets_of<'a>(&'a self, sentence_id: &'a str) -> impl Iterator<Item = &'a FactSynset> {
        self.synsets
            .iter()
            .filter(move |s| s.sentence_id == sentence_id)
    }

    pub fn add_sentence(&mut self, sentence: Sentence) -> Result<()> {
        if self.sentences.contains_key(&sentence.id) {
            return Err(Error::DuplicateSentence(sentence.id));
        }
        self.sentences.insert(sentence.id.clone(), sentence);
        Ok(())
    }

    /// Adds a synset; its sentence must already be present and its id must
    /// be new.
    pub fn add_synset(&mut self, synset: FactSynset) -> Result<()> {
        let Some(pos) = self.sentences.get_index_of(&synset.sentence_id) else {
            return Err(Error::UnknownSentence(synset.sentence_id));
        };
        if synset.patterns.is_empty() {
            return Err(Error::EmptySynset(synset.id));
        }
        if self.synset(&synset.id).is_some() {
            return Err(Error::DuplicateSynset(synset.id));
        }
        let insert_at = self
            .synsets
            .iter()
            .position(|s| self.sentences.get_index_of(&s.sentence_id).unwrap_or(0) > pos)
            .unwrap_or(self.synsets.len());
        self.synsets.insert(insert_at, synset);
        Ok(())
    }

    /// Appends a pattern to an existing synset.
    pub fn push_pattern(&mut self, synset_id: &str, pattern: TriplePattern) -> Result<()> {
        let synset = self
            .synsets
            .iter_mut()
            .find(|s| s.id == synset_id)
            .ok_or_else(|| Error::UnknownSynset(synset_id.to_owned()))?;
        synset.patterns.push(pattern);
        Ok(())
    }

    /// Keeps only the given sentences and their synsets.
    pub fn restrict<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> GoldCorpus {
        let keep: std::collections::HashSet<&str> = ids.into_iter().collect();
        GoldCorpus {
            sentences: self
                .sentences
                .iter()
                .filter(|(id, _)| keep.contains(id.as_str()))
                .map(|(id, s)| (id.clone(), s.clone()))
                .collect(),
            synsets: self
                .synsets
                .iter()
                .filter(|s| keep.contains(s.sentence_id.as_str()))
                .cloned()
                .collect(),
        }
    }
}
