//! Fact-level scoring, the token-overlap comparison scorer and
//! inter-annotator agreement.
//!
//! An extraction is correct iff it exactly matches some gold member of some
//! synset. TP counts covered synsets, FN uncovered synsets, FP extractions
//! that match nothing. Precision therefore mixes units (synsets over
//! synsets-plus-extractions); that is the intended definition.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::facets::{derive_default, Facet, FacetGold, GoldKey};
use crate::model::{Extraction, GoldCorpus, TokenSeq, Triple};
use crate::pattern::ExpandOptions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub synset_id: String,
    pub gold: GoldKey,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchedExtraction {
    pub extraction: Extraction,
    pub hits: Vec<Hit>,
}

impl MatchedExtraction {
    pub fn is_correct(&self) -> bool {
        !self.hits.is_empty()
    }
}

/// Deduplicated extractions with the synsets each one hits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchMatrix {
    pub facet: Facet,
    pub entries: Vec<MatchedExtraction>,
    /// Exact duplicates dropped before matching.
    pub duplicates_removed: usize,
}

impl MatchMatrix {
    pub fn by_sentence(&self) -> IndexMap<&str, Vec<&MatchedExtraction>> {
        let mut out: IndexMap<&str, Vec<&MatchedExtraction>> = IndexMap::new();
        for entry in &self.entries {
            out.entry(entry.extraction.sentence_id.as_str())
                .or_default()
                .push(entry);
        }
        out
    }
}

/// Drops repeated (sentence, triple) pairs, keeping the first.
pub fn dedup_extractions(extractions: &[Extraction]) -> (Vec<Extraction>, usize) {
    let mut seen: HashSet<(&str, &Triple)> = HashSet::new();
    let mut out = Vec::with_capacity(extractions.len());
    for e in extractions {
        if seen.insert((e.sentence_id.as_str(), &e.triple)) {
            out.push(e.clone());
        }
    }
    let removed = extractions.len() - out.len();
    (out, removed)
}

/// Finds, for each distinct extraction, every synset whose facet gold
/// contains it.
pub fn match_extractions(extractions: &[Extraction], gold: &FacetGold) -> Result<MatchMatrix> {
    let sentences: HashSet<&str> = gold.sentence_ids.iter().map(String::as_str).collect();
    let mut index: HashMap<(&str, &GoldKey), Vec<&str>> = HashMap::new();
    for synset in &gold.synsets {
        for key in &synset.members {
            index
                .entry((synset.sentence_id.as_str(), key))
                .or_default()
                .push(synset.id.as_str());
        }
    }
    let (unique, duplicates_removed) = dedup_extractions(extractions);
    let mut entries = Vec::with_capacity(unique.len());
    for extraction in unique {
        if !sentences.contains(extraction.sentence_id.as_str()) {
            return Err(Error::UnknownSentence(extraction.sentence_id));
        }
        let key = gold.key_of(&extraction.triple);
        let hits = index
            .get(&(extraction.sentence_id.as_str(), &key))
            .map(|ids| {
                ids.iter()
                    .map(|id| Hit {
                        synset_id: (*id).to_owned(),
                        gold: key.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        entries.push(MatchedExtraction { extraction, hits });
    }
    Ok(MatchMatrix {
        facet: gold.facet,
        entries,
        duplicates_removed,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Counts plus derived precision, recall and F1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Score {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Score {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }

    /// Sums counts and recomputes the ratios.
    pub fn merge(&self, other: &Score) -> Score {
        Score::from_counts(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub facet: Facet,
    #[serde(flatten)]
    pub score: Score,
    pub synsets: usize,
    /// Distinct extractions scored.
    pub extractions: usize,
    pub duplicates_removed: usize,
    /// Correct extractions whose triple lies in more than one synset; each
    /// of those synsets counts as covered.
    pub multi_synset_hits: usize,
    pub per_sentence: IndexMap<String, Score>,
}

/// Aggregates a match matrix into corpus and per-sentence counts.
pub fn score(matrix: &MatchMatrix, gold: &FacetGold) -> ScoreReport {
    let by_sentence = matrix.by_sentence();
    let mut per_sentence = IndexMap::new();
    let mut total = Score::default();
    let mut multi = 0;
    for sid in &gold.sentence_ids {
        let entries = by_sentence.get(sid.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let mut covered: HashSet<&str> = HashSet::new();
        let mut fp = 0;
        for entry in entries {
            if entry.hits.is_empty() {
                fp += 1;
            }
            if entry.hits.len() > 1 {
                multi += 1;
            }
            covered.extend(entry.hits.iter().map(|h| h.synset_id.as_str()));
        }
        let synsets = gold.synsets_of(sid).count();
        let tp = covered.len();
        let s = Score::from_counts(tp, fp, synsets - tp);
        total = total.merge(&s);
        per_sentence.insert(sid.clone(), s);
    }
    ScoreReport {
        facet: matrix.facet,
        score: total,
        synsets: gold.synsets.len(),
        extractions: matrix.entries.len(),
        duplicates_removed: matrix.duplicates_removed,
        multi_synset_hits: multi,
        per_sentence,
    }
}

/// Per-slot token-overlap scores of one extraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenOverlapScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn multiset_overlap(a: &TokenSeq, b: &TokenSeq) -> usize {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in b {
        *counts.entry(t.key()).or_default() += 1;
    }
    a.iter()
        .filter(|t| match counts.get_mut(t.key()) {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        })
        .count()
}

/// Slot-aligned overlap against one gold triple: matched tokens summed over
/// slots, divided by the extraction's (precision) or gold's (recall) token
/// total.
pub fn token_overlap_pair(extraction: &Triple, gold: &Triple) -> TokenOverlapScore {
    let matched: usize = extraction
        .slots()
        .iter()
        .zip(gold.slots())
        .map(|(e, g)| multiset_overlap(e, g))
        .sum();
    let precision = ratio(matched, extraction.token_count());
    let recall = ratio(matched, gold.token_count());
    TokenOverlapScore {
        precision,
        recall,
        f1: f1(precision, recall),
    }
}

/// Best-F1 gold triple for a single extraction, ties going to the earlier
/// gold. `None` when there is no gold.
pub fn best_overlap(extraction: &Triple, gold: &[Triple]) -> Option<(usize, TokenOverlapScore)> {
    let mut best: Option<(usize, TokenOverlapScore)> = None;
    for (i, g) in gold.iter().enumerate() {
        let s = token_overlap_pair(extraction, g);
        if best.map_or(true, |(_, b)| s.f1 > b.f1) {
            best = Some((i, s));
        }
    }
    best
}

/// Token-overlap score of one extraction against a sentence's gold
/// triples; zero when the gold list is empty.
pub fn token_overlap(extraction: &Triple, gold: &[Triple]) -> TokenOverlapScore {
    best_overlap(extraction, gold).map(|(_, s)| s).unwrap_or_default()
}

/// Greedy one-to-one assignment of extractions to gold triples by
/// descending pair F1 (ties by extraction then gold input order). Each gold
/// triple is used at most once; unassigned extractions get `None`.
pub fn assign_token_overlap(
    extractions: &[Triple],
    gold: &[Triple],
) -> Vec<Option<(usize, TokenOverlapScore)>> {
    let mut pairs: Vec<(usize, usize, TokenOverlapScore)> = Vec::new();
    for (i, e) in extractions.iter().enumerate() {
        for (j, g) in gold.iter().enumerate() {
            pairs.push((i, j, token_overlap_pair(e, g)));
        }
    }
    // stable sort keeps input order among equal F1
    pairs.sort_by(|a, b| b.2.f1.total_cmp(&a.2.f1));
    let mut out = vec![None; extractions.len()];
    let mut used = vec![false; gold.len()];
    for (i, j, s) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some((j, s));
            used[j] = true;
        }
    }
    out
}

/// Reference triples per sentence for token-overlap scoring.
pub type Reference = IndexMap<String, Vec<Triple>>;

/// Every distinct expanded gold triple of each sentence, in gold order.
pub fn reference_from_gold(corpus: &GoldCorpus, opts: ExpandOptions) -> Result<Reference> {
    let gold = derive_default(corpus, opts)?;
    let mut out: Reference = corpus.sentence_ids().map(|id| (id.to_owned(), Vec::new())).collect();
    for sid in &gold.sentence_ids {
        let mut seen = HashSet::new();
        let triples = out.get_mut(sid).expect("sentence listed");
        for t in gold.triples_of(sid) {
            if seen.insert(t) {
                triples.push(t.clone());
            }
        }
    }
    Ok(out)
}

/// Groups extraction-format reference triples by sentence, in input order.
pub fn reference_from_extractions(rows: &[Extraction]) -> Reference {
    let mut out = Reference::new();
    for r in rows {
        out.entry(r.sentence_id.clone()).or_default().push(r.triple.clone());
    }
    out
}

/// Corpus token-overlap score: precision is the mean over distinct
/// extractions of their best-match precision; recall is the mean over
/// reference triples of the best recall any extraction of the same
/// sentence reaches. Empty sides give 0.
pub fn token_overlap_corpus(extractions: &[Extraction], reference: &Reference) -> TokenOverlapScore {
    let (unique, _) = dedup_extractions(extractions);
    let empty = Vec::new();
    let precision_sum: f64 = unique
        .iter()
        .map(|e| token_overlap(&e.triple, reference.get(&e.sentence_id).unwrap_or(&empty)).precision)
        .sum();
    let mut recall_sum = 0.0;
    let mut n_ref = 0usize;
    for (sid, triples) in reference {
        for g in triples {
            n_ref += 1;
            recall_sum += unique
                .iter()
                .filter(|e| &e.sentence_id == sid)
                .map(|e| token_overlap_pair(&e.triple, g).recall)
                .fold(0.0, f64::max);
        }
    }
    let mean = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
    let precision = mean(precision_sum, unique.len());
    let recall = mean(recall_sum, n_ref);
    TokenOverlapScore {
        precision,
        recall,
        f1: f1(precision, recall),
    }
}

/// Fraction of `covered`'s synsets that share at least one expanded triple
/// with `by`'s triples for the same sentence. `None` if `covered` has no
/// synsets.
fn coverage(by: &FacetGold, covered: &FacetGold) -> Option<f64> {
    if covered.synsets.is_empty() {
        return None;
    }
    let mut pool: HashSet<(&str, &GoldKey)> = HashSet::new();
    for s in &by.synsets {
        pool.extend(s.members.iter().map(|k| (s.sentence_id.as_str(), k)));
    }
    let hit = covered
        .synsets
        .iter()
        .filter(|s| s.members.iter().any(|k| pool.contains(&(s.sentence_id.as_str(), k))))
        .count();
    Some(ratio(hit, covered.synsets.len()))
}

/// Mean of the two annotators' fact-level recalls of each other.
///
/// A direction whose target has no synsets is left out of the mean; two
/// empty annotations agree fully.
pub fn iaa(a: &GoldCorpus, b: &GoldCorpus, opts: ExpandOptions) -> Result<f64> {
    let ids_a: HashSet<&str> = a.sentence_ids().collect();
    let ids_b: HashSet<&str> = b.sentence_ids().collect();
    if ids_a != ids_b {
        let mut only: Vec<&str> = ids_a.symmetric_difference(&ids_b).copied().collect();
        only.sort_unstable();
        return Err(Error::SentenceMismatch(only.join(", ")));
    }
    let ga = derive_default(a, opts)?;
    let gb = derive_default(b, opts)?;
    let directions: Vec<f64> = [coverage(&ga, &gb), coverage(&gb, &ga)]
        .into_iter()
        .flatten()
        .collect();
    if directions.is_empty() {
        return Ok(1.0);
    }
    Ok(directions.iter().sum::<f64>() / directions.len() as f64)
}
