//! System-output and tagged-sentence readers, plus the adapters applied to
//! raw system output before scoring.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{is_explicit, normalize, Extraction, GoldCorpus, Sentence, TokenSeq, Triple};

/// One line of system output, before n-ary collapsing.
#[derive(Clone, Debug, PartialEq)]
pub struct RawExtraction {
    pub sentence_id: String,
    pub slots: Vec<TokenSeq>,
    pub confidence: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// The last column holds a confidence in [0, 1].
    pub with_confidence: bool,
}

/// Reads `sentence_id <TAB> slot1 <TAB> slot2 <TAB> slot3 [<TAB> slot4 ...]`
/// lines, with an optional trailing confidence column. Blank lines and `#`
/// comments are skipped.
pub fn read_extractions(stream: &str, opts: ReadOptions) -> Result<Vec<RawExtraction>> {
    let mut out = Vec::new();
    for (i, line) in stream.lines().enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields: Vec<&str> = line.split('\t').collect();
        let min = if opts.with_confidence { 5 } else { 4 };
        if fields.len() < min {
            return Err(Error::Format(format!(
                "expected at least {min} columns, found {}",
                fields.len()
            ))
            .at(line_no, 1));
        }
        let confidence = if opts.with_confidence {
            let col = fields.len();
            let raw = fields.pop().expect("checked length").trim();
            let value: f64 = raw
                .parse()
                .map_err(|_| Error::Format(format!("non-numeric confidence {raw:?}")).at(line_no, col))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Format(format!("confidence {value} outside [0, 1]")).at(line_no, col));
            }
            Some(value)
        } else {
            None
        };
        let sentence_id = fields[0].trim();
        if sentence_id.is_empty() {
            return Err(Error::Format("empty sentence id".into()).at(line_no, 1));
        }
        out.push(RawExtraction {
            sentence_id: sentence_id.to_owned(),
            slots: fields[1..].iter().map(|f| normalize(f)).collect(),
            confidence,
        });
    }
    Ok(out)
}

/// Folds slots 3..n into a single object.
pub fn collapse_nary(raw: &RawExtraction) -> Result<Extraction> {
    if raw.slots.len() < 3 {
        return Err(Error::Format(format!(
            "extraction needs at least 3 slots, found {}",
            raw.slots.len()
        )));
    }
    let object = TokenSeq::concat(&raw.slots[2..]);
    let triple = Triple::new(raw.slots[0].clone(), raw.slots[1].clone(), object)?;
    Ok(Extraction {
        sentence_id: raw.sentence_id.clone(),
        triple,
        confidence: raw.confidence,
    })
}

/// Converts raw lines to triples. Without `nary`, lines with more than
/// three slots are rejected.
pub fn to_extractions(raw: &[RawExtraction], nary: bool) -> Result<Vec<Extraction>> {
    raw.iter()
        .enumerate()
        .map(|(i, r)| {
            if !nary && r.slots.len() > 3 {
                return Err(Error::Format(format!(
                    "extraction {} has {} slots; enable n-ary collapsing",
                    i + 1,
                    r.slots.len()
                )));
            }
            collapse_nary(r)
        })
        .collect()
}

/// Splits extractions into those whose tokens all occur in their sentence
/// (multiset containment over the whole triple) and the implicit rest.
pub fn filter_implicit(
    extractions: Vec<Extraction>,
    corpus: &GoldCorpus,
) -> Result<(Vec<Extraction>, Vec<Extraction>)> {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for e in extractions {
        let sentence = corpus
            .sentence(&e.sentence_id)
            .ok_or_else(|| Error::UnknownSentence(e.sentence_id.clone()))?;
        if is_explicit(&e.triple, &sentence.tokens) {
            kept.push(e);
        } else {
            removed.push(e);
        }
    }
    Ok((kept, removed))
}

/// A sentence with aligned POS tags and, optionally, dependency labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub sentence: Sentence,
    pub pos: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deprels: Option<Vec<String>>,
}

impl TaggedSentence {
    pub fn new(sentence: Sentence, pos: Vec<String>, deprels: Option<Vec<String>>) -> Result<Self> {
        let n = sentence.tokens.len();
        if pos.len() != n {
            return Err(Error::Format(format!(
                "{} POS tags for {n} tokens in sentence {}",
                pos.len(),
                sentence.id
            )));
        }
        if let Some(d) = &deprels {
            if d.len() != n {
                return Err(Error::Format(format!(
                    "{} dependency labels for {n} tokens in sentence {}",
                    d.len(),
                    sentence.id
                )));
            }
        }
        Ok(TaggedSentence {
            sentence,
            pos,
            deprels,
        })
    }

    pub fn id(&self) -> &str {
        &self.sentence.id
    }

    /// Number of tokens whose dependency label equals `label`; `None` when
    /// the sentence carries no labels.
    pub fn count_deprel(&self, label: &str) -> Option<usize> {
        self.deprels
            .as_ref()
            .map(|d| d.iter().filter(|l| l.as_str() == label).count())
    }
}

pub fn default_verb_tags() -> HashSet<String> {
    HashSet::from(["VERB".to_owned()])
}

/// Baseline extractor: every verb-tagged token becomes a predicate, with
/// everything before it as subject and everything after it as object.
/// Candidates with an empty subject or object are dropped.
pub fn naive_extract(tagged: &TaggedSentence, verb_tags: &HashSet<String>) -> Vec<Extraction> {
    let tokens = tagged.sentence.tokens.tokens();
    tagged
        .pos
        .iter()
        .enumerate()
        .filter(|(_, tag)| verb_tags.contains(tag.as_str()))
        .filter_map(|(i, _)| {
            let triple = Triple::new(
                TokenSeq::new(tokens[..i].to_vec()),
                TokenSeq::new(vec![tokens[i].clone()]),
                TokenSeq::new(tokens[i + 1..].to_vec()),
            )
            .ok()?;
            Some(Extraction::new(tagged.id(), triple))
        })
        .collect()
}

fn parse_block(rows: &[(usize, &str)], sent_id: Option<String>, first_line: usize) -> Result<TaggedSentence> {
    let id = sent_id.ok_or_else(|| Error::Format("missing \"# sent_id\" comment".into()).at(first_line, 1))?;
    let mut width = None;
    let mut tokens = Vec::new();
    let mut pos = Vec::new();
    let mut deprels = Vec::new();
    for &(line_no, row) in rows {
        let cols: Vec<&str> = row.split('\t').collect();
        match width {
            None => width = Some(cols.len()),
            Some(w) if w != cols.len() => {
                return Err(Error::Format(format!(
                    "row has {} columns, block started with {w}",
                    cols.len()
                ))
                .at(line_no, 1))
            }
            _ => {}
        }
        let (form, tag, rel) = match cols.len() {
            10 => {
                // multiword ranges and empty nodes carry no tag of their own
                if cols[0].contains(['-', '.']) {
                    continue;
                }
                (cols[1], cols[3], Some(cols[7]))
            }
            3 => (cols[0], cols[1], Some(cols[2])),
            2 => (cols[0], cols[1], None),
            n => {
                return Err(Error::Format(format!(
                    "expected 2, 3 or 10 columns, found {n}"
                ))
                .at(line_no, 1))
            }
        };
        if form.is_empty() || form.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(form.to_owned()).at(line_no, 1));
        }
        tokens.push(form);
        pos.push(tag.to_owned());
        if let Some(rel) = rel {
            deprels.push(rel.to_owned());
        }
    }
    let deprels = if deprels.is_empty() || deprels.iter().all(|d| d == "_") {
        None
    } else {
        Some(deprels)
    };
    let sentence = Sentence::new(id, tokens.join(" "));
    TaggedSentence::new(sentence, pos, deprels).map_err(|e| e.at(first_line, 1))
}

/// Reads CoNLL-U (10 columns) or simplified `token <TAB> POS [<TAB> deprel]`
/// blocks separated by blank lines. Each block needs a `# sent_id = <id>`
/// comment.
pub fn read_tagged(stream: &str) -> Result<Vec<TaggedSentence>> {
    let mut out = Vec::new();
    let mut rows: Vec<(usize, &str)> = Vec::new();
    let mut sent_id: Option<String> = None;
    let mut block_start = 1;
    let mut seen = HashSet::new();
    let mut flush = |rows: &mut Vec<(usize, &str)>, sent_id: &mut Option<String>, start: usize| -> Result<()> {
        if rows.is_empty() {
            if sent_id.is_some() {
                return Err(Error::Format("sentence block without tokens".into()).at(start, 1));
            }
            return Ok(());
        }
        let tagged = parse_block(rows, sent_id.take(), start)?;
        if !seen.insert(tagged.id().to_owned()) {
            return Err(Error::DuplicateSentence(tagged.id().to_owned()).at(start, 1));
        }
        out.push(tagged);
        rows.clear();
        Ok(())
    };
    for (i, line) in stream.lines().enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            flush(&mut rows, &mut sent_id, block_start)?;
            block_start = line_no + 1;
        } else if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    sent_id = Some(value.trim().to_owned());
                }
            }
        } else {
            rows.push((line_no, line));
        }
    }
    flush(&mut rows, &mut sent_id, block_start)?;
    Ok(out)
}
