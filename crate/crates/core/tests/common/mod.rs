//! Random gold, pattern and extraction generators shared by the integration
//! tests. Brute-force oracles here deliberately avoid the crate's expansion
//! code.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;

use benchie::gold::{expand_synset, parse_gold};
use benchie::{ExpandOptions, Extraction, GoldCorpus, Triple};
use rand::seq::IndexedRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub enum Part {
    Lit(String),
    Opt(Vec<String>),
    Alt(Vec<Vec<String>>),
}

/// A pattern described independently of the crate's parser.
#[derive(Clone, Debug)]
pub struct GenPattern {
    pub slots: [Vec<Part>; 3],
    pub glue: bool,
}

impl GenPattern {
    pub fn render_slot(&self, i: usize) -> String {
        let words: Vec<String> = self.slots[i]
            .iter()
            .map(|p| match (p, self.glue) {
                (Part::Lit(t), _) => t.clone(),
                (Part::Opt(ts), false) => format!("[ {} ]", ts.join(" ")),
                (Part::Opt(ts), true) => format!("[{}]", ts.join(" ")),
                (Part::Alt(alts), glue) => {
                    let body: Vec<String> = alts.iter().map(|a| a.join(" ")).collect();
                    if glue {
                        format!("{{{}}}", body.join(" | "))
                    } else {
                        format!("{{ {} }}", body.join(" | "))
                    }
                }
            })
            .collect();
        words.join(" ")
    }

    pub fn rendered(&self) -> [String; 3] {
        [self.render_slot(0), self.render_slot(1), self.render_slot(2)]
    }

    pub fn optional_groups(&self) -> u32 {
        self.parts().filter(|p| matches!(p, Part::Opt(_))).count() as u32
    }

    pub fn alternation_sizes(&self) -> Vec<usize> {
        self.parts()
            .filter_map(|p| match p {
                Part::Alt(a) => Some(a.len()),
                _ => None,
            })
            .collect()
    }

    /// 2^optional_groups times the product of alternation sizes.
    pub fn closed_form(&self) -> u128 {
        let alts: u128 = self.alternation_sizes().iter().map(|&n| n as u128).product();
        (1u128 << self.optional_groups()) * alts
    }

    fn parts(&self) -> impl Iterator<Item = &Part> {
        self.slots.iter().flatten()
    }

    /// Enumerates every assignment with a mixed-radix counter.
    pub fn brute_force(&self, keep_optionals: bool) -> BTreeSet<[String; 3]> {
        let radices: Vec<usize> = self
            .parts()
            .map(|p| match p {
                Part::Lit(_) => 1,
                Part::Opt(_) => {
                    if keep_optionals {
                        2
                    } else {
                        1
                    }
                }
                Part::Alt(a) => a.len(),
            })
            .collect();
        let total: usize = radices.iter().product();
        let mut out = BTreeSet::new();
        for mut n in 0..total {
            let mut digits = Vec::with_capacity(radices.len());
            for r in &radices {
                digits.push(n % r);
                n /= r;
            }
            let mut k = 0;
            let mut triple: [String; 3] = Default::default();
            for (slot, parts) in self.slots.iter().enumerate() {
                let mut words: Vec<&str> = Vec::new();
                for p in parts {
                    let d = digits[k];
                    k += 1;
                    match p {
                        Part::Lit(t) => words.push(t),
                        Part::Opt(ts) => {
                            if keep_optionals && d == 1 {
                                words.extend(ts.iter().map(String::as_str));
                            }
                        }
                        Part::Alt(alts) => words.extend(alts[d].iter().map(String::as_str)),
                    }
                }
                triple[slot] = words.join(" ");
            }
            out.insert(triple);
        }
        out
    }
}

pub fn triple_key(t: &Triple) -> [String; 3] {
    [t.subject.join(), t.predicate.join(), t.object.join()]
}

/// A pattern with at most `max_opt` optional and `max_alt` alternation
/// groups, every token distinct.
pub fn random_pattern(rng: &mut impl Rng, max_opt: usize, max_alt: usize) -> GenPattern {
    let mut next = 0usize;
    let mut fresh = || {
        next += 1;
        format!("t{next}")
    };
    let mut slots: [Vec<Part>; 3] = Default::default();
    for slot in slots.iter_mut() {
        for _ in 0..rng.random_range(0..=2) {
            slot.push(Part::Lit(fresh()));
        }
    }
    for _ in 0..rng.random_range(0..=max_opt) {
        let slot = &mut slots[rng.random_range(0..3)];
        let group = (0..rng.random_range(1..=2)).map(|_| fresh()).collect();
        slot.insert(rng.random_range(0..=slot.len()), Part::Opt(group));
    }
    for _ in 0..rng.random_range(0..=max_alt) {
        let slot = &mut slots[rng.random_range(0..3)];
        let alts = (0..rng.random_range(2..=3))
            .map(|_| (0..rng.random_range(1..=2)).map(|_| fresh()).collect())
            .collect();
        slot.insert(rng.random_range(0..=slot.len()), Part::Alt(alts));
    }
    for slot in slots.iter_mut() {
        if !slot.iter().any(|p| !matches!(p, Part::Opt(_))) {
            slot.push(Part::Lit(fresh()));
        }
    }
    GenPattern {
        slots,
        glue: rng.random_bool(0.5),
    }
}

const VOCAB: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn word(rng: &mut impl Rng) -> &'static str {
    VOCAB[rng.random_range(0..VOCAB.len())]
}

fn random_slot(rng: &mut impl Rng) -> String {
    let mut words: Vec<String> = Vec::new();
    let n = rng.random_range(1..=3);
    for i in 0..n {
        match rng.random_range(0..10) {
            0..=5 => words.push(word(rng).into()),
            6..=7 => words.push(format!("[ {} ]", word(rng))),
            _ => words.push(format!("{{ {} | {} {} }}", word(rng), word(rng), word(rng))),
        }
        if i == n - 1 && words.iter().all(|w| w.starts_with('[')) {
            words.push(word(rng).into());
        }
    }
    words.join(" ")
}

/// A small gold document over a shared eight-word vocabulary, so triples
/// collide across synsets and sentences.
pub fn random_gold_doc(rng: &mut impl Rng, max_sentences: usize) -> String {
    let mut doc = String::new();
    let mut synset = 0;
    for s in 0..rng.random_range(1..=max_sentences) {
        let _ = writeln!(doc, "sent\ts{s}\t{}", VOCAB.join(" "));
        for _ in 0..rng.random_range(0..=3) {
            synset += 1;
            for _ in 0..rng.random_range(1..=2) {
                let flag = if rng.random_bool(0.3) { "\tno-entity" } else { "" };
                let _ = writeln!(
                    doc,
                    "fact\ts{s}\tf{synset}\t{}\t{}\t{}{flag}",
                    random_slot(rng),
                    random_slot(rng),
                    random_slot(rng)
                );
            }
        }
    }
    doc
}

pub fn random_corpus(rng: &mut impl Rng, max_sentences: usize) -> GoldCorpus {
    parse_gold(&random_gold_doc(rng, max_sentences)).expect("generated gold parses")
}

/// Extractions mixing gold triples, minimal forms, slot re-splits of gold
/// triples, random noise and duplicates.
pub fn random_extractions(rng: &mut impl Rng, corpus: &GoldCorpus) -> Vec<Extraction> {
    let opts = ExpandOptions::default();
    let mut out = Vec::new();
    for sid in corpus.sentence_ids() {
        let synsets: Vec<_> = corpus.synsets_of(sid).collect();
        for _ in 0..rng.random_range(0..=6) {
            let roll = rng.random_range(0..20);
            let triple = if synsets.is_empty() || roll >= 15 {
                let mut slot = || {
                    (0..rng.random_range(1..=2))
                        .map(|_| word(rng))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                let (s, p, o) = (slot(), slot(), slot());
                Triple::parse(&s, &p, &o).unwrap()
            } else {
                let synset = synsets.choose(rng).unwrap();
                let pattern = synset.patterns.choose(rng).unwrap();
                let pool: Vec<Triple> = if roll < 3 {
                    pattern.minimal_forms(opts).unwrap().into_iter().collect()
                } else {
                    expand_synset(synset, opts).unwrap().into_iter().collect()
                };
                let t = pool.choose(rng).unwrap().clone();
                if roll >= 10 {
                    resplit(rng, &t)
                } else {
                    t
                }
            };
            out.push(Extraction::new(sid, triple));
        }
    }
    if !out.is_empty() {
        for _ in 0..rng.random_range(0..=2) {
            let dup = out.choose(rng).unwrap().clone();
            out.push(dup);
        }
    }
    out
}

/// Same tokens, slot boundaries moved at random.
pub fn resplit(rng: &mut impl Rng, t: &Triple) -> Triple {
    let words: Vec<String> = t.concatenated().iter().map(|x| x.surface().to_owned()).collect();
    let n = words.len();
    let i = rng.random_range(1..=n - 2);
    let j = rng.random_range(i + 1..=n - 1);
    Triple::parse(&words[..i].join(" "), &words[i..j].join(" "), &words[j..].join(" ")).unwrap()
}
