//! Text output. Ratios are printed with two decimals.

use std::fmt::Write as _;

use benchie::facets::FacetGold;
use benchie::profiling::{BucketReport, FeatureBuckets, ERROR_BUCKETS};
use benchie::{Score, ScoreReport, TokenOverlapScore};
use serde::Serialize;

use crate::commands::Loaded;

#[derive(Serialize)]
pub struct CompareRow {
    pub sentence_id: String,
    pub extraction: String,
    pub token_precision: f64,
    pub token_recall: f64,
    pub fact: u8,
}

fn score_row(out: &mut String, label: &str, s: &Score) {
    let _ = writeln!(
        out,
        "{label:<10} {:>5.2} {:>5.2} {:>5.2} {:>5} {:>5} {:>5}",
        s.precision, s.recall, s.f1, s.tp, s.fp, s.fn_
    );
}

pub fn score_text(loaded: &Loaded, reports: &[ScoreReport], per_sentence: bool) -> String {
    let mut out = String::new();
    let first = &reports[0];
    let _ = write!(
        out,
        "system {}: {} extractions, {} duplicates removed",
        loaded.path.display(),
        first.extractions,
        first.duplicates_removed
    );
    if loaded.implicit_removed > 0 {
        let _ = write!(out, ", {} implicit removed", loaded.implicit_removed);
    }
    let _ = writeln!(out, "; {} synsets", first.synsets);
    let _ = writeln!(out, "{:<10} {:>5} {:>5} {:>5} {:>5} {:>5} {:>5}", "facet", "P", "R", "F1", "tp", "fp", "fn");
    for r in reports {
        score_row(&mut out, r.facet.label(), &r.score);
        if per_sentence {
            for (sid, s) in &r.per_sentence {
                score_row(&mut out, &format!("  {sid}"), s);
            }
        }
    }
    out
}

pub fn compare_text(rows: &[CompareRow], token: &TokenOverlapScore, fact: &Score) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>4} {:<10} {:>6} {:>6} {:>4}  extraction", "#", "sentence", "tokP", "tokR", "fact");
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4} {:<10} {:>6.2} {:>6.2} {:>4}  {}",
            i + 1,
            r.sentence_id,
            r.token_precision,
            r.token_recall,
            r.fact,
            r.extraction
        );
    }
    let _ = writeln!(out, "\n{:<14} {:>5} {:>5} {:>5}", "corpus", "P", "R", "F1");
    let _ = writeln!(out, "{:<14} {:>5.2} {:>5.2} {:>5.2}", "token-overlap", token.precision, token.recall, token.f1);
    let _ = writeln!(out, "{:<14} {:>5.2} {:>5.2} {:>5.2}", "fact", fact.precision, fact.recall, fact.f1);
    let _ = writeln!(
        out,
        "{:<14} {:>5.2} {:>5.2} {:>5.2}",
        "delta",
        token.precision - fact.precision,
        token.recall - fact.recall,
        token.f1 - fact.f1
    );
    out
}

pub fn expand_text(gold: &FacetGold, list: bool, total: usize, mean: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:<12} {:>8}", "sentence", "synset", "count");
    for s in &gold.synsets {
        let _ = writeln!(out, "{:<12} {:<12} {:>8}", s.sentence_id, s.id, s.members.len());
        if list {
            for m in &s.members {
                let _ = writeln!(out, "    {m}");
            }
        }
    }
    let _ = writeln!(
        out,
        "facet {}: {} synsets, {total} expansions, {mean:.2} per synset",
        gold.facet,
        gold.synsets.len()
    );
    out
}

pub fn profile_text(errors: &BucketReport, features: &[FeatureBuckets]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "incorrect extractions: {}", errors.incorrect);
    let _ = writeln!(out, "{:<10} {:>6}", "bucket", "count");
    for sig in ERROR_BUCKETS {
        let _ = writeln!(out, "{:<10} {:>6}", sig.to_string(), errors.count(sig));
    }
    let f = &errors.per_slot_error_fraction;
    let _ = write!(
        out,
        "slot error fraction: subject {:.2}, predicate {:.2}, object {:.2}",
        f.subject, f.predicate, f.object
    );
    if !errors.fractions_defined {
        out.push_str(" (no incorrect extractions)");
    }
    out.push('\n');
    for fb in features {
        let _ = writeln!(out, "\nfeature {}", fb.scheme.name);
        let _ = writeln!(out, "{:<8} {:>9} {:>5} {:>5} {:>5}", "bucket", "sentences", "P", "R", "F1");
        for b in &fb.buckets {
            let s = b.report.as_ref().map(|r| r.score).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:<8} {:>9} {:>5.2} {:>5.2} {:>5.2}",
                b.label,
                b.sentence_ids.len(),
                s.precision,
                s.recall,
                s.f1
            );
        }
    }
    out
}
