//! Gold views for the evaluation facets.
//!
//! * `default`: every expansion of every pattern.
//! * `E`: only patterns flagged entity-clean.
//! * `C`: each default triple collapsed to the concatenation of its slots;
//!   extractions are compared the same way.
//! * `M`: expansions with every optional group dropped.
//!
//! Per synset, E and M gold are subsets of default gold, and C gold is the
//! image of default gold under concatenation, so every extraction that
//! matches under E or M also matches under default, and every default match
//! is a C match.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gold::write_fact_line;
use crate::model::{Extraction, GoldCorpus, TokenSeq, Triple};
use crate::pattern::{ExpandOptions, TriplePattern};
use crate::scoring::{match_extractions, score, ScoreReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Facet {
    #[default]
    #[serde(rename = "default")]
    Default,
    #[serde(rename = "E")]
    Entity,
    #[serde(rename = "C")]
    Concat,
    #[serde(rename = "M")]
    Minimal,
}

impl Facet {
    pub const ALL: [Facet; 4] = [Facet::Default, Facet::Entity, Facet::Concat, Facet::Minimal];

    pub fn label(self) -> &'static str {
        match self {
            Facet::Default => "default",
            Facet::Entity => "E",
            Facet::Concat => "C",
            Facet::Minimal => "M",
        }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Facet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Facet::Default),
            "E" | "e" | "entity" => Ok(Facet::Entity),
            "C" | "c" | "concat" => Ok(Facet::Concat),
            "M" | "m" | "minimal" => Ok(Facet::Minimal),
            other => Err(Error::Format(format!(
                "unknown facet {other:?} (expected default, E, C or M)"
            ))),
        }
    }
}

/// What an extraction is compared against: a triple, or for the
/// concatenation facet a flat utterance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldKey {
    Triple(Triple),
    Utterance(TokenSeq),
}

impl fmt::Display for GoldKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoldKey::Triple(t) => t.fmt(f),
            GoldKey::Utterance(u) => write!(f, "\"{u}\""),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldSynset {
    pub id: String,
    pub sentence_id: String,
    pub members: IndexSet<GoldKey>,
}

/// Gold of one facet: every synset of the corpus, possibly with an empty
/// member set (still counted towards recall).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetGold {
    pub facet: Facet,
    pub sentence_ids: Vec<String>,
    pub synsets: Vec<GoldSynset>,
}

impl FacetGold {
    /// The key an extraction's triple is looked up under.
    pub fn key_of(&self, triple: &Triple) -> GoldKey {
        match self.facet {
            Facet::Concat => GoldKey::Utterance(triple.concatenated()),
            _ => GoldKey::Triple(triple.clone()),
        }
    }

    pub fn synsets_of<'a>(&'a self, sentence_id: &'a str) -> impl Iterator<Item = &'a GoldSynset> {
        self.synsets
            .iter()
            .filter(move |s| s.sentence_id == sentence_id)
    }

    /// All gold triples of one sentence, across synsets. Empty for the
    /// concatenation facet.
    pub fn triples_of<'a>(&'a self, sentence_id: &'a str) -> impl Iterator<Item = &'a Triple> {
        self.synsets_of(sentence_id)
            .flat_map(|s| s.members.iter())
            .filter_map(|k| match k {
                GoldKey::Triple(t) => Some(t),
                GoldKey::Utterance(_) => None,
            })
    }

    pub fn member_count(&self) -> usize {
        self.synsets.iter().map(|s| s.members.len()).sum()
    }

    pub fn restrict<'a>(&self, ids: impl IntoIterator<Item = &'a str>) -> FacetGold {
        let keep: std::collections::HashSet<&str> = ids.into_iter().collect();
        FacetGold {
            facet: self.facet,
            sentence_ids: self
                .sentence_ids
                .iter()
                .filter(|id| keep.contains(id.as_str()))
                .cloned()
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

fn build(
    corpus: &GoldCorpus,
    facet: Facet,
    mut per_pattern: impl FnMut(&TriplePattern) -> Result<Vec<GoldKey>>,
) -> Result<FacetGold> {
    let mut synsets = Vec::with_capacity(corpus.synsets().len());
    for synset in corpus.synsets() {
        let mut members = IndexSet::new();
        for pattern in &synset.patterns {
            members.extend(per_pattern(pattern)?);
        }
        synsets.push(GoldSynset {
            id: synset.id.clone(),
            sentence_id: synset.sentence_id.clone(),
            members,
        });
    }
    Ok(FacetGold {
        facet,
        sentence_ids: corpus.sentence_ids().map(str::to_owned).collect(),
        synsets,
    })
}

fn as_triples(set: IndexSet<Triple>) -> Vec<GoldKey> {
    set.into_iter().map(GoldKey::Triple).collect()
}

pub fn derive_default(corpus: &GoldCorpus, opts: ExpandOptions) -> Result<FacetGold> {
    build(corpus, Facet::Default, |p| Ok(as_triples(p.expand(opts)?)))
}

/// Expansions of entity-clean patterns only.
pub fn derive_entity(corpus: &GoldCorpus, opts: ExpandOptions) -> Result<FacetGold> {
    build(corpus, Facet::Entity, |p| {
        if p.entity_clean {
            Ok(as_triples(p.expand(opts)?))
        } else {
            Ok(Vec::new())
        }
    })
}

/// Concatenated slot content of every default triple.
pub fn derive_concat(corpus: &GoldCorpus, opts: ExpandOptions) -> Result<FacetGold> {
    build(corpus, Facet::Concat, |p| {
        Ok(p.expand(opts)?
            .iter()
            .map(|t| GoldKey::Utterance(t.concatenated()))
            .collect())
    })
}

/// Union of minimal forms over each synset's patterns.
pub fn derive_minimal(corpus: &GoldCorpus, opts: ExpandOptions) -> Result<FacetGold> {
    build(corpus, Facet::Minimal, |p| Ok(as_triples(p.minimal_forms(opts)?)))
}

pub fn derive(corpus: &GoldCorpus, facet: Facet, opts: ExpandOptions) -> Result<FacetGold> {
    match facet {
        Facet::Default => derive_default(corpus, opts),
        Facet::Entity => derive_entity(corpus, opts),
        Facet::Concat => derive_concat(corpus, opts),
        Facet::Minimal => derive_minimal(corpus, opts),
    }
}

/// Matches and scores `extractions` against the facet's gold.
pub fn score_facet(
    extractions: &[Extraction],
    corpus: &GoldCorpus,
    facet: Facet,
    opts: ExpandOptions,
) -> Result<ScoreReport> {
    let gold = derive(corpus, facet, opts)?;
    let matrix = match_extractions(extractions, &gold)?;
    Ok(score(&matrix, &gold))
}

/// Writes facet gold as literal patterns in the gold file format. Triple
/// facets produce `fact` lines; the concatenation facet produces
/// single-slot `utt <TAB> sentence_id <TAB> synset_id <TAB> utterance`
/// lines. Synsets left empty by the facet are listed as comments.
pub fn export_facet_gold(gold: &FacetGold, corpus: &GoldCorpus) -> Result<String> {
    let mut out = format!("# facet {}\n", gold.facet);
    for sentence in corpus.sentences() {
        if !gold.sentence_ids.contains(&sentence.id) {
            continue;
        }
        let _ = writeln!(out, "sent\t{}\t{}", sentence.id, sentence.tokens.join());
        for synset in gold.synsets_of(&sentence.id) {
            if synset.members.is_empty() {
                let _ = writeln!(out, "# {} has no members under this facet", synset.id);
            }
            for key in &synset.members {
                match key {
                    GoldKey::Triple(t) => {
                        write_fact_line(&mut out, &sentence.id, &synset.id, &TriplePattern::from_triple(t)?)
                    }
                    GoldKey::Utterance(u) => {
                        let literal = crate::pattern::SlotPattern::literal(u)?;
                        let _ = writeln!(out, "utt\t{}\t{}\t{literal}", sentence.id, synset.id);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gold::{expand_synset, parse_gold};
    use std::collections::HashSet;

    fn mitchell() -> GoldCorpus {
        parse_gold(fixtures::MITCHELL_GOLD).unwrap()
    }

    fn members<'a>(g: &'a FacetGold, id: &str) -> &'a IndexSet<GoldKey> {
        &g.synsets.iter().find(|s| s.id == id).unwrap().members
    }

    fn triple(s: &str, p: &str, o: &str) -> GoldKey {
        GoldKey::Triple(Triple::parse(s, p, o).unwrap())
    }

    #[test]
    fn facet_labels_parse() {
        for f in Facet::ALL {
            assert_eq!(f.label().parse::<Facet>().unwrap(), f);
        }
        assert!("X".parse::<Facet>().is_err());
    }

    #[test]
    fn entity_facet_keeps_clean_patterns() {
        let opts = ExpandOptions::default();
        let e = derive_entity(&mitchell(), opts).unwrap();
        let f4 = members(&e, "f4");
        assert_eq!(f4.len(), 8);
        for key in f4 {
            let GoldKey::Triple(t) = key else { panic!() };
            assert_eq!(t.object.join(), "procedural actions");
        }
        // set-difference oracle: default minus the flagged pattern's expansion
        let g = mitchell();
        let synset = g.synset("f4").unwrap();
        let flagged: HashSet<Triple> = synset.patterns[1].expand(opts).unwrap().into_iter().collect();
        let oracle: HashSet<GoldKey> = expand_synset(synset, opts)
            .unwrap()
            .into_iter()
            .filter(|t| !flagged.contains(t))
            .map(GoldKey::Triple)
            .collect();
        assert_eq!(f4.iter().cloned().collect::<HashSet<_>>(), oracle);
    }

    #[test]
    fn entity_facet_is_identity_when_all_clean() {
        let doc = fixtures::MITCHELL_GOLD.replace("\tno-entity", "");
        let g = parse_gold(&doc).unwrap();
        let opts = ExpandOptions::default();
        let e = derive_entity(&g, opts).unwrap();
        let d = derive_default(&g, opts).unwrap();
        assert_eq!(e.synsets, d.synsets);
    }

    #[test]
    fn unmatchable_synset_still_counts() {
        let g = parse_gold("sent\tS\ta b c\nfact\tS\tf\ta\tb\tc\tno-entity\n").unwrap();
        let opts = ExpandOptions::default();
        let es = vec![Extraction::new("S", Triple::parse("a", "b", "c").unwrap())];
        let r = score_facet(&es, &g, Facet::Entity, opts).unwrap();
        assert_eq!((r.score.tp, r.score.fp, r.score.fn_), (0, 1, 1));
    }

    #[test]
    fn concat_facet_merges_slot_boundaries() {
        let c = derive_concat(&mitchell(), ExpandOptions::default()).unwrap();
        let f4 = members(&c, "f4");
        // two subjects times four optional assignments
        assert_eq!(f4.len(), 8);
        assert!(f4.contains(&GoldKey::Utterance(TokenSeq::from(
            "he is confident he has sufficient votes to block such a measure with procedural actions"
        ))));
        let d = derive_default(&mitchell(), ExpandOptions::default()).unwrap();
        for (cs, ds) in c.synsets.iter().zip(&d.synsets) {
            assert!(cs.members.len() <= ds.members.len());
        }
    }

    #[test]
    fn concat_of_single_token_slots() {
        let t = Triple::parse("a", "b", "c").unwrap();
        assert_eq!(t.concatenated(), TokenSeq::from("a b c"));
    }

    #[test]
    fn minimal_facet_of_f4() {
        let m = derive_minimal(&mitchell(), ExpandOptions::default()).unwrap();
        let expected: IndexSet<GoldKey> = [
            triple("Sen. Mitchell", "is confident he has sufficient votes to block measure with", "procedural actions"),
            triple("he", "is confident he has sufficient votes to block measure with", "procedural actions"),
            triple("Sen. Mitchell", "is confident he has sufficient votes to block measure", "with procedural actions"),
            triple("he", "is confident he has sufficient votes to block measure", "with procedural actions"),
        ]
        .into_iter()
        .collect();
        assert_eq!(members(&m, "f4").iter().collect::<HashSet<_>>(), expected.iter().collect());
    }

    #[test]
    fn minimal_without_optionals_is_full_expansion() {
        let g = parse_gold("sent\tS\ta b c\nfact\tS\tf\t{a | b}\tb\tc\n").unwrap();
        let opts = ExpandOptions::default();
        assert_eq!(
            derive_minimal(&g, opts).unwrap().synsets,
            derive_default(&g, opts).unwrap().synsets
        );
    }

    #[test]
    fn minimal_size_is_alternation_assignments_after_dedup() {
        // both patterns collapse to "x"/"y" subject with "p" "o" once optionals drop
        let g = parse_gold(
            "sent\tS\tthe x y p o\n\
             fact\tS\tf\t[the] {x | y}\tp\to\n\
             fact\tS\tf\t{x | y} [the]\tp\t[the] o\n",
        )
        .unwrap();
        let m = derive_minimal(&g, ExpandOptions::default()).unwrap();
        assert_eq!(m.synsets[0].members.len(), 2);
    }

    #[test]
    fn t4_matches_concat_and_minimal() {
        let g = mitchell();
        let (s, p, o) = fixtures::EXTRACTIONS[3];
        let es = vec![Extraction::new(fixtures::S1, Triple::parse(s, p, o).unwrap())];
        for facet in [Facet::Concat, Facet::Minimal, Facet::Default] {
            let r = score_facet(&es, &g, facet, ExpandOptions::default()).unwrap();
            assert_eq!(r.score.tp, 1, "facet {facet}");
        }
    }

    #[test]
    fn derivations_are_deterministic() {
        let opts = ExpandOptions::default();
        for f in Facet::ALL {
            assert_eq!(derive(&mitchell(), f, opts).unwrap(), derive(&mitchell(), f, opts).unwrap());
        }
    }

    #[test]
    fn export_lists_literal_members() {
        let g = mitchell();
        let opts = ExpandOptions::default();
        let m = derive_minimal(&g, opts).unwrap();
        let text = export_facet_gold(&m, &g).unwrap();
        let reparsed = parse_gold(&text).unwrap();
        let again = derive_default(&reparsed, opts).unwrap();
        assert_eq!(again.synsets.len(), m.synsets.len());
        for (a, b) in again.synsets.iter().zip(&m.synsets) {
            assert_eq!(a.members, b.members);
        }
        let c = export_facet_gold(&derive_concat(&g, opts).unwrap(), &g).unwrap();
        assert!(c.lines().any(|l| l.starts_with("utt\tS1\tf4\t")));
    }
}
