//! Annotation sessions: tagged sentences plus draft fact synsets stored as
//! token-index selections.

use std::collections::HashSet;
use std::fmt::Write as _;

use benchie::gold::write_fact_line;
use benchie::ingest::TaggedSentence;
use benchie::pattern::SlotElement;
use benchie::{ExpandOptions, GoldCorpus, SlotPattern, Token, TriplePattern};
use serde::{Deserialize, Serialize};

use crate::error::{AnnotateError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Highlight {
    VerbCandidate,
    NounCandidate,
    None,
}

impl Highlight {
    pub fn from_pos(tag: &str) -> Self {
        match tag {
            "VERB" | "AUX" => Highlight::VerbCandidate,
            "NOUN" | "PROPN" => Highlight::NounCandidate,
            _ => Highlight::None,
        }
    }
}

/// One selected sentence token. Adjacent optional tokens with the same
/// `group` export as a single optional group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedToken {
    pub index: usize,
    #[serde(default)]
    pub optional: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<u32>,
}

impl SelectedToken {
    pub fn new(index: usize) -> Self {
        SelectedToken {
            index,
            optional: false,
            group: None,
        }
    }

    pub fn optional(index: usize) -> Self {
        SelectedToken {
            optional: true,
            ..SelectedToken::new(index)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DraftPattern {
    pub subject: Vec<SelectedToken>,
    pub predicate: Vec<SelectedToken>,
    pub object: Vec<SelectedToken>,
    #[serde(default = "default_true")]
    pub entity_clean: bool,
}

fn default_true() -> bool {
    true
}

impl DraftPattern {
    /// A pattern with no optional tokens.
    pub fn plain(subject: &[usize], predicate: &[usize], object: &[usize]) -> Self {
        let sel = |ix: &[usize]| ix.iter().copied().map(SelectedToken::new).collect();
        DraftPattern {
            subject: sel(subject),
            predicate: sel(predicate),
            object: sel(object),
            entity_clean: true,
        }
    }

    pub fn slots(&self) -> [(&'static str, &[SelectedToken]); 3] {
        [
            ("subject", &self.subject),
            ("predicate", &self.predicate),
            ("object", &self.object),
        ]
    }

    /// The gold-format pattern this draft stands for.
    pub fn to_pattern(&self, tokens: &[Token]) -> Result<TriplePattern> {
        let mut slots = Vec::with_capacity(3);
        for (name, sel) in self.slots() {
            if sel.is_empty() {
                return Err(AnnotateError::Invalid(format!("empty {name} slot")));
            }
            let mut elements: Vec<SlotElement> = Vec::new();
            let mut seen = HashSet::new();
            let mut last_group = None;
            for s in sel {
                let token = tokens.get(s.index).ok_or_else(|| {
                    AnnotateError::Invalid(format!(
                        "{name} token index {} out of range ({} tokens)",
                        s.index,
                        tokens.len()
                    ))
                })?;
                if !seen.insert(s.index) {
                    return Err(AnnotateError::Invalid(format!(
                        "{name} selects token {} twice",
                        s.index
                    )));
                }
                match elements.last_mut() {
                    Some(SlotElement::Optional(group)) if s.optional && last_group == Some(s.group) => {
                        group.push(token.clone())
                    }
                    _ if s.optional => elements.push(SlotElement::Optional(vec![token.clone()])),
                    _ => elements.push(SlotElement::Literal(token.clone())),
                }
                last_group = s.optional.then_some(s.group);
            }
            let slot = SlotPattern::from_elements(elements)
                .map_err(|e| AnnotateError::Invalid(format!("{name}: {e}")))?;
            slots.push(slot);
        }
        let object = slots.pop().unwrap();
        let predicate = slots.pop().unwrap();
        let subject = slots.pop().unwrap();
        Ok(TriplePattern::new(subject, predicate, object, self.entity_clean))
    }
}

/// A fact cluster under construction; `id` becomes the synset id on export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DraftSynset {
    pub id: String,
    pub patterns: Vec<DraftPattern>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub tagged: TaggedSentence,
    #[serde(default)]
    pub drafts: Vec<DraftSynset>,
}

impl SentenceRecord {
    pub fn id(&self) -> &str {
        self.tagged.id()
    }

    pub fn highlights(&self) -> Vec<Highlight> {
        self.tagged.pos.iter().map(|p| Highlight::from_pos(p)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSession {
    pub id: String,
    pub revision: u64,
    pub sentences: Vec<SentenceRecord>,
}

impl AnnotationSession {
    pub fn new(id: impl Into<String>, tagged: Vec<TaggedSentence>) -> Result<Self> {
        let id = id.into();
        check_id("session", &id)?;
        let mut seen = HashSet::new();
        for t in &tagged {
            if !seen.insert(t.id().to_owned()) {
                return Err(AnnotateError::Invalid(format!("duplicate sentence id {:?}", t.id())));
            }
        }
        Ok(AnnotationSession {
            id,
            revision: 0,
            sentences: tagged
                .into_iter()
                .map(|tagged| SentenceRecord {
                    tagged,
                    drafts: Vec::new(),
                })
                .collect(),
        })
    }

    pub fn sentence(&self, id: &str) -> Result<&SentenceRecord> {
        self.sentences
            .iter()
            .find(|s| s.id() == id)
            .ok_or_else(|| AnnotateError::NotFound(format!("sentence {id:?}")))
    }

    /// Replaces the drafts of one sentence if `expected_revision` is
    /// current. Returns the new revision.
    pub fn put_annotation(
        &mut self,
        sentence_id: &str,
        drafts: Vec<DraftSynset>,
        expected_revision: u64,
    ) -> Result<u64> {
        let pos = self
            .sentences
            .iter()
            .position(|s| s.id() == sentence_id)
            .ok_or_else(|| AnnotateError::NotFound(format!("sentence {sentence_id:?}")))?;
        if expected_revision != self.revision {
            return Err(AnnotateError::Conflict {
                expected: expected_revision,
                current: self.revision,
            });
        }
        let tokens = self.sentences[pos].tagged.sentence.tokens.tokens();
        let taken: HashSet<&str> = self
            .sentences
            .iter()
            .filter(|s| s.id() != sentence_id)
            .flat_map(|s| s.drafts.iter().map(|d| d.id.as_str()))
            .collect();
        let mut ids = HashSet::new();
        for d in &drafts {
            check_id("synset", &d.id)?;
            if taken.contains(d.id.as_str()) || !ids.insert(d.id.as_str()) {
                return Err(AnnotateError::Invalid(format!("synset id {:?} already in use", d.id)));
            }
            if d.patterns.is_empty() {
                return Err(AnnotateError::Invalid(format!("synset {:?} has no patterns", d.id)));
            }
            for p in &d.patterns {
                p.to_pattern(tokens)
                    .map_err(|e| AnnotateError::Invalid(format!("synset {:?}: {e}", d.id)))?;
            }
        }
        self.sentences[pos].drafts = drafts;
        self.revision += 1;
        Ok(self.revision)
    }

    pub fn draft_count(&self) -> usize {
        self.sentences.iter().map(|s| s.drafts.len()).sum()
    }

    /// Gold-format text of every sentence that has drafts, after a header
    /// comment.
    pub fn export_gold(&self) -> Result<String> {
        let mut out = format!("# session {} revision {}\n", self.id, self.revision);
        for record in self.sentences.iter().filter(|s| !s.drafts.is_empty()) {
            let sentence = &record.tagged.sentence;
            let _ = writeln!(out, "\nsent\t{}\t{}", sentence.id, sentence.tokens.join());
            for draft in &record.drafts {
                for p in &draft.patterns {
                    write_fact_line(&mut out, &sentence.id, &draft.id, &p.to_pattern(sentence.tokens.tokens())?);
                }
            }
        }
        Ok(out)
    }

    /// Expansion size of each draft synset, as the annotator would see it.
    pub fn preview(&self, sentence_id: &str, drafts: &[DraftSynset]) -> Result<Vec<(String, usize)>> {
        let tokens = self.sentence(sentence_id)?.tagged.sentence.tokens.tokens();
        drafts
            .iter()
            .map(|d| {
                let mut all = std::collections::HashSet::new();
                for p in &d.patterns {
                    let pattern = p.to_pattern(tokens)?;
                    all.extend(
                        pattern
                            .expand(ExpandOptions::default())
                            .map_err(|e| AnnotateError::Invalid(e.to_string()))?,
                    );
                }
                Ok((d.id.clone(), all.len()))
            })
            .collect()
    }

    /// Loads drafts from an existing gold corpus over the same sentences.
    /// Alternation groups become one draft pattern per alternative
    /// combination; each optional group keeps its own group number.
    pub fn import_gold(&mut self, corpus: &GoldCorpus) -> Result<()> {
        for record in &mut self.sentences {
            record.drafts.clear();
        }
        for synset in corpus.synsets() {
            let record = self
                .sentences
                .iter_mut()
                .find(|s| s.id() == synset.sentence_id)
                .ok_or_else(|| AnnotateError::Invalid(format!("gold sentence {:?} not in session", synset.sentence_id)))?;
            let tokens = record.tagged.sentence.tokens.tokens();
            let mut patterns = Vec::new();
            for p in &synset.patterns {
                for split in split_alternations(p) {
                    patterns.push(draft_from_pattern(&split, tokens)?);
                }
            }
            record.drafts.push(DraftSynset {
                id: synset.id.clone(),
                patterns,
            });
        }
        Ok(())
    }
}

fn check_id(kind: &str, id: &str) -> Result<()> {
    if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == '/') {
        return Err(AnnotateError::Invalid(format!("invalid {kind} id {id:?}")));
    }
    Ok(())
}

/// One pattern per combination of alternatives; optional groups are kept.
fn split_alternations(p: &TriplePattern) -> Vec<TriplePattern> {
    fn split_slot(slot: &SlotPattern) -> Vec<Vec<SlotElement>> {
        let mut out: Vec<Vec<SlotElement>> = vec![Vec::new()];
        for el in slot.elements() {
            match el {
                SlotElement::Alternation(alts) => {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            alts.iter().map(move |alt| {
                                let mut next = prefix.clone();
                                next.extend(alt.iter().cloned().map(SlotElement::Literal));
                                next
                            })
                        })
                        .collect();
                }
                other => out.iter_mut().for_each(|v| v.push(other.clone())),
            }
        }
        out
    }
    let mut out = Vec::new();
    for s in split_slot(&p.subject) {
        for pr in split_slot(&p.predicate) {
            for o in split_slot(&p.object) {
                let slot = |els: Vec<SlotElement>| SlotPattern::from_elements(els).expect("alternatives are mandatory");
                out.push(TriplePattern::new(slot(s.clone()), slot(pr.clone()), slot(o.clone()), p.entity_clean));
            }
        }
    }
    out
}

/// Maps pattern tokens to sentence indices, taking the first unused
/// occurrence within each slot.
fn draft_from_pattern(p: &TriplePattern, tokens: &[Token]) -> Result<DraftPattern> {
    let mut group = 0u32;
    let mut slots = Vec::with_capacity(3);
    for slot in p.slots() {
        let mut used = HashSet::new();
        let mut sel = Vec::new();
        let pick = |t: &Token, used: &mut HashSet<usize>| {
            tokens
                .iter()
                .enumerate()
                .position(|(i, s)| s == t && !used.contains(&i))
                .inspect(|&i| {
                    used.insert(i);
                })
                .ok_or_else(|| AnnotateError::Invalid(format!("token {:?} not in sentence", t.surface())))
        };
        for el in slot.elements() {
            match el {
                SlotElement::Literal(t) => sel.push(SelectedToken::new(pick(t, &mut used)?)),
                SlotElement::Optional(ts) => {
                    group += 1;
                    for t in ts {
                        sel.push(SelectedToken {
                            index: pick(t, &mut used)?,
                            optional: true,
                            group: Some(group),
                        });
                    }
                }
                SlotElement::Alternation(_) => unreachable!("alternations are split before import"),
            }
        }
        slots.push(sel);
    }
    let object = slots.pop().unwrap();
    let predicate = slots.pop().unwrap();
    let subject = slots.pop().unwrap();
    Ok(DraftPattern {
        subject,
        predicate,
        object,
        entity_clean: p.entity_clean,
    })
}
