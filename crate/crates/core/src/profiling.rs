//! Automatic error analysis: slot-error signatures of incorrect extractions
//! and scores over sentence buckets.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::facets::FacetGold;
use crate::ingest::TaggedSentence;
use crate::model::{seq_equal, Extraction, Triple};
use crate::scoring::{dedup_extractions, match_extractions, score, ScoreReport};

/// Which slots of an extraction equal the corresponding gold slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotSignature {
    pub subject: bool,
    pub predicate: bool,
    pub object: bool,
}

impl SlotSignature {
    pub const fn new(subject: bool, predicate: bool, object: bool) -> Self {
        SlotSignature {
            subject,
            predicate,
            object,
        }
    }

    pub fn of(extraction: &Triple, gold: &Triple) -> Self {
        SlotSignature::new(
            seq_equal(&extraction.subject, &gold.subject),
            seq_equal(&extraction.predicate, &gold.predicate),
            seq_equal(&extraction.object, &gold.object),
        )
    }

    pub fn matched_slots(self) -> usize {
        usize::from(self.subject) + usize::from(self.predicate) + usize::from(self.object)
    }

    pub fn is_correct(self) -> bool {
        self.matched_slots() == 3
    }
}

/// The seven error buckets, most-matched first.
pub const ERROR_BUCKETS: [SlotSignature; 7] = [
    SlotSignature::new(true, true, false),
    SlotSignature::new(true, false, true),
    SlotSignature::new(false, true, true),
    SlotSignature::new(true, false, false),
    SlotSignature::new(false, true, false),
    SlotSignature::new(false, false, true),
    SlotSignature::new(false, false, false),
];

impl fmt::Display for SlotSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            u8::from(self.subject),
            u8::from(self.predicate),
            u8::from(self.object)
        )
    }
}

impl Serialize for SlotSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Signatures against the gold triples that match the extraction in the
/// most slots. Ties return every competing signature; no gold at all gives
/// `(0,0,0)`.
pub fn closest_gold<'a>(
    extraction: &Triple,
    gold: impl IntoIterator<Item = &'a Triple>,
) -> BTreeSet<SlotSignature> {
    let mut best = 0;
    let mut out = BTreeSet::new();
    for g in gold {
        let sig = SlotSignature::of(extraction, g);
        let n = sig.matched_slots();
        if n > best {
            best = n;
            out.clear();
        }
        if n == best {
            out.insert(sig);
        }
    }
    if out.is_empty() {
        out.insert(SlotSignature::new(false, false, false));
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SlotFractions {
    pub subject: f64,
    pub predicate: f64,
    pub object: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BucketReport {
    /// Count per error bucket; a tied extraction counts in each bucket.
    pub counts: BTreeMap<SlotSignature, usize>,
    pub incorrect: usize,
    /// Share of incorrect extractions with an error in each slot. These do
    /// not sum to one.
    pub per_slot_error_fraction: SlotFractions,
    /// False when there were no incorrect extractions and the fractions are
    /// reported as zero.
    pub fractions_defined: bool,
}

impl BucketReport {
    pub fn count(&self, sig: SlotSignature) -> usize {
        self.counts.get(&sig).copied().unwrap_or(0)
    }
}

/// Buckets every incorrect (deduplicated) extraction by its closest gold
/// triples. Meant for the default facet.
pub fn bucketize_errors(extractions: &[Extraction], gold: &FacetGold) -> Result<BucketReport> {
    let matrix = match_extractions(extractions, gold)?;
    let mut counts: BTreeMap<SlotSignature, usize> = ERROR_BUCKETS.iter().map(|s| (*s, 0)).collect();
    let mut incorrect = 0;
    let mut slot_errors = [0usize; 3];
    for entry in matrix.entries.iter().filter(|e| !e.is_correct()) {
        incorrect += 1;
        let e = &entry.extraction;
        let sigs = closest_gold(&e.triple, gold.triples_of(&e.sentence_id));
        for sig in &sigs {
            *counts.entry(*sig).or_default() += 1;
        }
        slot_errors[0] += usize::from(sigs.iter().any(|s| !s.subject));
        slot_errors[1] += usize::from(sigs.iter().any(|s| !s.predicate));
        slot_errors[2] += usize::from(sigs.iter().any(|s| !s.object));
    }
    let frac = |n: usize| if incorrect == 0 { 0.0 } else { n as f64 / incorrect as f64 };
    Ok(BucketReport {
        counts,
        incorrect,
        per_slot_error_fraction: SlotFractions {
            subject: frac(slot_errors[0]),
            predicate: frac(slot_errors[1]),
            object: frac(slot_errors[2]),
        },
        fractions_defined: incorrect > 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    /// Token count.
    Length,
    /// Number of tokens carrying this dependency label.
    DeprelCount(String),
}

/// A sentence feature cut into buckets by inclusive upper bounds; the last
/// bucket is open-ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BucketScheme {
    pub name: String,
    pub feature: Feature,
    pub upper_bounds: Vec<usize>,
}

impl BucketScheme {
    pub fn new(name: impl Into<String>, feature: Feature, upper_bounds: Vec<usize>) -> Result<Self> {
        if upper_bounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("bucket bounds must be strictly increasing".into()));
        }
        Ok(BucketScheme {
            name: name.into(),
            feature,
            upper_bounds,
        })
    }

    /// <=20, 21-30, >30 tokens.
    pub fn length() -> Self {
        BucketScheme::new("length", Feature::Length, vec![20, 30]).expect("valid bounds")
    }

    /// No conjuncts vs. one or more.
    pub fn conj() -> Self {
        BucketScheme::new("conj", Feature::DeprelCount("conj".into()), vec![0]).expect("valid bounds")
    }

    /// 0-1, 2-3, 4+ case markers.
    pub fn case() -> Self {
        Self::case_with(vec![1, 3]).expect("valid bounds")
    }

    pub fn case_with(upper_bounds: Vec<usize>) -> Result<Self> {
        BucketScheme::new("case", Feature::DeprelCount("case".into()), upper_bounds)
    }

    pub fn bucket_count(&self) -> usize {
        self.upper_bounds.len() + 1
    }

    pub fn bucket_of(&self, value: usize) -> usize {
        self.upper_bounds
            .iter()
            .position(|&hi| value <= hi)
            .unwrap_or(self.upper_bounds.len())
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.bucket_count());
        let mut lo = 0;
        for (i, &hi) in self.upper_bounds.iter().enumerate() {
            out.push(if i == 0 {
                if hi == 0 {
                    "0".to_owned()
                } else {
                    format!("≤{hi}")
                }
            } else if lo == hi {
                format!("{lo}")
            } else {
                format!("{lo}–{hi}")
            });
            lo = hi + 1;
        }
        out.push(format!("≥{lo}"));
        out
    }

    pub fn value_of(&self, sentence: &TaggedSentence) -> Result<usize> {
        match &self.feature {
            Feature::Length => Ok(sentence.sentence.tokens.len()),
            Feature::DeprelCount(label) => sentence.count_deprel(label).ok_or_else(|| {
                Error::Format(format!(
                    "sentence {} has no dependency labels, needed by the {} scheme",
                    sentence.id(),
                    self.name
                ))
            }),
        }
    }
}

impl FromStr for BucketScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(BucketScheme::length()),
            "conj" => Ok(BucketScheme::conj()),
            "case" => Ok(BucketScheme::case()),
            other => Err(Error::Format(format!(
                "unknown bucket scheme {other:?} (expected length, conj or case)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceBucket {
    pub label: String,
    pub sentence_ids: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ScoreReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureBuckets {
    pub scheme: BucketScheme,
    pub buckets: Vec<SentenceBucket>,
}

/// Plot-ready series: one x label and one F1 value per bucket.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlotSeries {
    pub feature: String,
    pub buckets: Vec<String>,
    pub f1: Vec<f64>,
}

/// Assigns every tagged sentence to exactly one bucket of `scheme`.
pub fn bucketize_sentences(tagged: &[TaggedSentence], scheme: &BucketScheme) -> Result<FeatureBuckets> {
    let mut buckets: Vec<SentenceBucket> = scheme
        .labels()
        .into_iter()
        .map(|label| SentenceBucket {
            label,
            sentence_ids: Vec::new(),
            report: None,
        })
        .collect();
    for sentence in tagged {
        let value = scheme.value_of(sentence)?;
        buckets[scheme.bucket_of(value)]
            .sentence_ids
            .push(sentence.id().to_owned());
    }
    Ok(FeatureBuckets {
        scheme: scheme.clone(),
        buckets,
    })
}

impl FeatureBuckets {
    /// Scores each bucket on the gold and extractions of its own sentences.
    /// Every gold sentence must fall in some bucket.
    pub fn score(&mut self, extractions: &[Extraction], gold: &FacetGold) -> Result<()> {
        let bucketed: HashSet<&str> = self
            .buckets
            .iter()
            .flat_map(|b| b.sentence_ids.iter().map(String::as_str))
            .collect();
        if let Some(missing) = gold.sentence_ids.iter().find(|id| !bucketed.contains(id.as_str())) {
            return Err(Error::Format(format!("sentence {missing} has no tagged data")));
        }
        let (unique, _) = dedup_extractions(extractions);
        for bucket in &mut self.buckets {
            let ids: HashSet<&str> = bucket.sentence_ids.iter().map(String::as_str).collect();
            let sub_gold = gold.restrict(ids.iter().copied());
            let sub_extractions: Vec<Extraction> = unique
                .iter()
                .filter(|e| ids.contains(e.sentence_id.as_str()))
                .cloned()
                .collect();
            let matrix = match_extractions(&sub_extractions, &sub_gold)?;
            bucket.report = Some(score(&matrix, &sub_gold));
        }
        Ok(())
    }

    pub fn series(&self) -> PlotSeries {
        PlotSeries {
            feature: self.scheme.name.clone(),
            buckets: self.buckets.iter().map(|b| b.label.clone()).collect(),
            f1: self
                .buckets
                .iter()
                .map(|b| b.report.as_ref().map_or(0.0, |r| r.score.f1))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facets::derive_default;
    use crate::fixtures;
    use crate::gold::{expand_corpus, parse_gold};
    use crate::model::Sentence;
    use crate::pattern::ExpandOptions;

    fn sig(s: u8, p: u8, o: u8) -> SlotSignature {
        SlotSignature::new(s == 1, p == 1, o == 1)
    }

    fn t(i: usize) -> Extraction {
        let (s, p, o) = fixtures::EXTRACTIONS[i];
        Extraction::new(fixtures::S1, Triple::parse(s, p, o).unwrap())
    }

    #[test]
    fn t1_is_closest_to_subject_predicate() {
        let g = parse_gold(fixtures::MITCHELL_GOLD).unwrap();
        let expanded = expand_corpus(&g, ExpandOptions::default()).unwrap();
        let all: Vec<&Triple> = expanded.values().flatten().collect();
        // brute force: best matched-slot count over all expanded triples
        let best = all
            .iter()
            .map(|g| SlotSignature::of(&t(0).triple, g).matched_slots())
            .max()
            .unwrap();
        assert_eq!(best, 2);
        assert_eq!(closest_gold(&t(0).triple, all.iter().copied()), BTreeSet::from([sig(1, 1, 0)]));
    }

    #[test]
    fn exact_match_signature() {
        let g = Triple::parse("a", "b", "c").unwrap();
        assert_eq!(closest_gold(&g, [&g]), BTreeSet::from([sig(1, 1, 1)]));
        assert_eq!(closest_gold(&g, []), BTreeSet::from([sig(0, 0, 0)]));
    }

    #[test]
    fn ties_return_all_buckets() {
        let g1 = Triple::parse("a", "p", "x").unwrap();
        let g2 = Triple::parse("b", "p", "y").unwrap();
        let e = Triple::parse("a", "p", "y").unwrap();
        let out = closest_gold(&e, [&g1, &g2]);
        assert_eq!(out, BTreeSet::from([sig(1, 1, 0), sig(0, 1, 1)]));
        assert!(out.iter().all(|s| s.matched_slots() == 2));
    }

    #[test]
    fn worked_example_errors_are_object_errors() {
        let g = parse_gold(fixtures::MITCHELL_GOLD).unwrap();
        let gold = derive_default(&g, ExpandOptions::default()).unwrap();
        let r = bucketize_errors(&[t(0), t(1), t(2)], &gold).unwrap();
        assert_eq!(r.incorrect, 3);
        assert_eq!(r.count(sig(1, 1, 0)), 3);
        assert_eq!(r.counts.values().sum::<usize>(), 3);
        assert_eq!(r.per_slot_error_fraction.object, 1.0);
        assert_eq!(r.per_slot_error_fraction.subject, 0.0);
        assert_eq!(r.per_slot_error_fraction.predicate, 0.0);
        assert!(r.fractions_defined);
    }

    #[test]
    fn correct_extractions_are_not_bucketed() {
        let g = parse_gold(fixtures::MITCHELL_GOLD).unwrap();
        let gold = derive_default(&g, ExpandOptions::default()).unwrap();
        let r = bucketize_errors(&[t(3)], &gold).unwrap();
        assert_eq!(r.incorrect, 0);
        assert_eq!(r.counts.values().sum::<usize>(), 0);
        assert!(!r.fractions_defined);
        assert_eq!(r.per_slot_error_fraction, SlotFractions::default());
        assert!(!r.counts.contains_key(&sig(1, 1, 1)));
    }

    #[test]
    fn tie_increments_both_buckets() {
        let g = parse_gold("sent\tS\ta b p x y\nfact\tS\tf1\ta\tp\tx\nfact\tS\tf2\tb\tp\ty\n").unwrap();
        let gold = derive_default(&g, ExpandOptions::default()).unwrap();
        let e = Extraction::new("S", Triple::parse("a", "p", "y").unwrap());
        let r = bucketize_errors(&[e], &gold).unwrap();
        assert_eq!(r.incorrect, 1);
        assert_eq!(r.count(sig(1, 1, 0)), 1);
        assert_eq!(r.count(sig(0, 1, 1)), 1);
        assert_eq!(r.per_slot_error_fraction.subject, 1.0);
        assert_eq!(r.per_slot_error_fraction.object, 1.0);
        assert_eq!(r.per_slot_error_fraction.predicate, 0.0);
    }

    fn tagged(id: &str, n: usize, rels: &[&str]) -> TaggedSentence {
        let text: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut deprels: Vec<String> = rels.iter().map(|s| s.to_string()).collect();
        deprels.resize(n, "dep".into());
        TaggedSentence::new(Sentence::new(id, text.join(" ")), vec!["X".into(); n], Some(deprels)).unwrap()
    }

    #[test]
    fn scheme_labels_and_assignment() {
        let length = BucketScheme::length();
        assert_eq!(length.labels(), ["≤20", "21–30", "≥31"]);
        assert_eq!(length.bucket_of(18), 0);
        assert_eq!(length.bucket_of(20), 0);
        assert_eq!(length.bucket_of(21), 1);
        assert_eq!(length.bucket_of(31), 2);
        assert_eq!(BucketScheme::conj().labels(), ["0", "≥1"]);
        assert_eq!(BucketScheme::case().labels(), ["≤1", "2–3", "≥4"]);
        assert!(BucketScheme::case_with(vec![3, 1]).is_err());

        let fb = bucketize_sentences(&[tagged("a", 18, &[])], &length).unwrap();
        assert_eq!(fb.buckets[0].label, "≤20");
        assert_eq!(fb.buckets[0].sentence_ids, ["a"]);

        let conj = bucketize_sentences(&[tagged("c", 5, &["conj", "cc", "conj"])], &BucketScheme::conj()).unwrap();
        assert_eq!(conj.buckets[1].label, "≥1");
        assert_eq!(conj.buckets[1].sentence_ids, ["c"]);
    }

    #[test]
    fn deprel_schemes_need_labels() {
        let bare = TaggedSentence::new(Sentence::new("x", "a b"), vec!["X".into(); 2], None).unwrap();
        assert!(bucketize_sentences(std::slice::from_ref(&bare), &BucketScheme::case()).is_err());
        assert!(bucketize_sentences(&[bare], &BucketScheme::length()).is_ok());
    }

    #[test]
    fn bucket_scores_partition_corpus() {
        let g = parse_gold(
            "sent\ts1\tw0 w1 w2\nsent\ts2\tw0 w1 w2 w3\nsent\ts3\tw0 w1 w2 w3 w4\n\
             fact\ts1\ta\tw0\tw1\tw2\nfact\ts2\tb\tw0\tw1\tw2 w3\nfact\ts3\tc\tw0\tw1\tw2\n\
             fact\ts3\td\tw0\tw3\tw4\n",
        )
        .unwrap();
        let gold = derive_default(&g, ExpandOptions::default()).unwrap();
        let tagged = vec![
            tagged("s1", 3, &["case"]),
            tagged("s2", 4, &["case", "case", "conj"]),
            tagged("s3", 5, &["case", "case", "case", "case"]),
        ];
        let es = vec![
            Extraction::new("s1", Triple::parse("w0", "w1", "w2").unwrap()),
            Extraction::new("s2", Triple::parse("w0", "w1", "w2").unwrap()),
            Extraction::new("s3", Triple::parse("w0", "w3", "w4").unwrap()),
            Extraction::new("s3", Triple::parse("w0", "w3", "w4").unwrap()),
        ];
        let full = score(&match_extractions(&es, &gold).unwrap(), &gold);
        for scheme in [BucketScheme::length(), BucketScheme::conj(), BucketScheme::case()] {
            let mut fb = bucketize_sentences(&tagged, &scheme).unwrap();
            fb.score(&es, &gold).unwrap();
            let reports: Vec<&ScoreReport> = fb.buckets.iter().map(|b| b.report.as_ref().unwrap()).collect();
            assert_eq!(reports.iter().map(|r| r.score.tp).sum::<usize>(), full.score.tp);
            assert_eq!(reports.iter().map(|r| r.score.fn_).sum::<usize>(), full.score.fn_);
            assert_eq!(reports.iter().map(|r| r.score.fp).sum::<usize>(), full.score.fp);
            assert_eq!(fb.series().buckets.len(), scheme.bucket_count());
        }
        let mut partial = bucketize_sentences(&tagged[..2], &BucketScheme::length()).unwrap();
        assert!(partial.score(&es, &gold).is_err());
    }
}
