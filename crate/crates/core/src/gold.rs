//! Line-based gold file format.
//!
//! ```text
//! sent <TAB> sentence_id <TAB> tokenized sentence text
//! fact <TAB> sentence_id <TAB> synset_id <TAB> subject <TAB> predicate <TAB> object [<TAB> flags]
//! ```
//!
//! Slot columns use the pattern grammar of [`crate::pattern`]. `flags` is a
//! comma-separated list; `no-entity` marks a pattern as not entity-clean.
//! Blank lines and lines starting with `#` are ignored. Fact lines sharing a
//! synset id form one synset.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{uses_sentence_tokens, FactSynset, GoldCorpus, Sentence, Triple};
use crate::pattern::{ExpandOptions, SlotPattern, TriplePattern};

pub const NO_ENTITY_FLAG: &str = "no-entity";

fn lines(stream: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    stream.lines().enumerate().filter_map(|(i, line)| {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').collect()))
        }
    })
}

fn parse_flags(raw: &str) -> Result<bool> {
    let mut entity_clean = true;
    for flag in raw.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        match flag {
            NO_ENTITY_FLAG => entity_clean = false,
            other => return Err(Error::Format(format!("unknown flag {other:?}"))),
        }
    }
    Ok(entity_clean)
}

/// Parses a gold document. Errors carry the 1-based line and column (tab
/// field) of the offending input.
pub fn parse_gold(stream: &str) -> Result<GoldCorpus> {
    let mut corpus = GoldCorpus::new();
    for (line, fields) in lines(stream) {
        match fields[0] {
            "sent" => {
                if fields.len() != 3 {
                    return Err(Error::Format(format!(
                        "sent line needs 3 columns, found {}",
                        fields.len()
                    ))
                    .at(line, 1));
                }
                if fields[1].trim().is_empty() {
                    return Err(Error::Format("empty sentence id".into()).at(line, 2));
                }
                corpus
                    .add_sentence(Sentence::new(fields[1], fields[2]))
                    .map_err(|e| e.at(line, 2))?;
            }
            "fact" => {}
            other => {
                return Err(Error::Format(format!("unknown record type {other:?}")).at(line, 1))
            }
        }
    }
    let mut synset_sentence: HashMap<String, String> = HashMap::new();
    for (line, fields) in lines(stream) {
        if fields[0] != "fact" {
            continue;
        }
        if !(6..=7).contains(&fields.len()) {
            return Err(Error::Format(format!(
                "fact line needs 6 or 7 columns, found {}",
                fields.len()
            ))
            .at(line, 1));
        }
        let sentence_id = fields[1];
        let synset_id = fields[2];
        if corpus.sentence(sentence_id).is_none() {
            return Err(Error::UnknownSentence(sentence_id.to_owned()).at(line, 2));
        }
        if synset_id.trim().is_empty() {
            return Err(Error::Format("empty synset id".into()).at(line, 3));
        }
        let mut slots = Vec::with_capacity(3);
        for col in 3..6 {
            slots.push(SlotPattern::parse(fields[col]).map_err(|e| e.at(line, col + 1))?);
        }
        let entity_clean = match fields.get(6) {
            Some(raw) => parse_flags(raw).map_err(|e| e.at(line, 7))?,
            None => true,
        };
        let [subject, predicate, object]: [SlotPattern; 3] =
            slots.try_into().expect("three slots");
        let pattern = TriplePattern::new(subject, predicate, object, entity_clean);
        match synset_sentence.get(synset_id) {
            Some(owner) if owner == sentence_id => {
                corpus
                    .push_pattern(synset_id, pattern)
                    .map_err(|e| e.at(line, 3))?;
            }
            Some(_) => return Err(Error::DuplicateSynset(synset_id.to_owned()).at(line, 3)),
            None => {
                corpus
                    .add_synset(FactSynset {
                        id: synset_id.to_owned(),
                        sentence_id: sentence_id.to_owned(),
                        patterns: vec![pattern],
                    })
                    .map_err(|e| e.at(line, 3))?;
                synset_sentence.insert(synset_id.to_owned(), sentence_id.to_owned());
            }
        }
    }
    Ok(corpus)
}

fn sentence_text(sentence: &Sentence) -> String {
    if sentence.text.contains(['\t', '\n', '\r']) {
        sentence.tokens.join()
    } else {
        sentence.text.clone()
    }
}

/// Writes one `fact` line.
pub fn write_fact_line(out: &mut String, sentence_id: &str, synset_id: &str, p: &TriplePattern) {
    let _ = write!(
        out,
        "fact\t{sentence_id}\t{synset_id}\t{}\t{}\t{}",
        p.subject, p.predicate, p.object
    );
    if !p.entity_clean {
        let _ = write!(out, "\t{NO_ENTITY_FLAG}");
    }
    out.push('\n');
}

/// Serializes a corpus so that `parse_gold` reproduces it exactly.
pub fn serialize_gold(corpus: &GoldCorpus) -> String {
    let mut out = String::new();
    for (i, sentence) in corpus.sentences().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "sent\t{}\t{}", sentence.id, sentence_text(sentence));
        for synset in corpus.synsets_of(&sentence.id) {
            for pattern in &synset.patterns {
                write_fact_line(&mut out, &sentence.id, &synset.id, pattern);
            }
        }
    }
    out
}

/// Concrete triples of one synset: union of its pattern expansions.
pub fn expand_synset(synset: &FactSynset, opts: ExpandOptions) -> Result<IndexSet<Triple>> {
    let mut out = IndexSet::new();
    for pattern in &synset.patterns {
        out.extend(pattern.expand(opts)?);
    }
    Ok(out)
}

/// Per-synset concrete triples, deduplicated within each synset.
pub fn expand_corpus(
    corpus: &GoldCorpus,
    opts: ExpandOptions,
) -> Result<IndexMap<String, IndexSet<Triple>>> {
    corpus
        .synsets()
        .iter()
        .map(|s| Ok((s.id.clone(), expand_synset(s, opts)?)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub sentence_id: String,
    pub synset_id: Option<String>,
    pub message: String,
}

/// Gold-corpus checks beyond what parsing enforces:
///
/// * expansions above the cap (error)
/// * expanded triples using tokens absent from the sentence (error)
/// * one surface triple listed in two synsets of a sentence (warning)
/// * synsets with no entity-clean pattern (warning)
pub fn validate(corpus: &GoldCorpus, opts: ExpandOptions) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    for sentence in corpus.sentences() {
        let mut owner: HashMap<Triple, String> = HashMap::new();
        for synset in corpus.synsets_of(&sentence.id) {
            let issue = |severity, message: String| ValidationIssue {
                severity,
                sentence_id: sentence.id.clone(),
                synset_id: Some(synset.id.clone()),
                message,
            };
            if synset.patterns.iter().all(|p| !p.entity_clean) {
                issues.push(issue(
                    Severity::Warning,
                    "no entity-clean pattern; unmatchable under the entity facet".into(),
                ));
            }
            let triples = match expand_synset(synset, opts) {
                Ok(t) => t,
                Err(e) => {
                    issues.push(issue(Severity::Error, e.to_string()));
                    continue;
                }
            };
            let mut implicit = 0usize;
            let mut example = None;
            for triple in &triples {
                if !uses_sentence_tokens(triple, &sentence.tokens) {
                    implicit += 1;
                    example.get_or_insert_with(|| triple.to_string());
                }
                match owner.get(triple) {
                    Some(other) if other != &synset.id => issues.push(issue(
                        Severity::Warning,
                        format!("triple {triple} also listed in synset {other}"),
                    )),
                    Some(_) => {}
                    None => {
                        owner.insert(triple.clone(), synset.id.clone());
                    }
                }
            }
            if let Some(example) = example {
                issues.push(issue(
                    Severity::Error,
                    format!(
                        "{implicit} expanded triple(s) use tokens not in the sentence, e.g. {example}"
                    ),
                ));
            }
        }
    }
    issues
}
