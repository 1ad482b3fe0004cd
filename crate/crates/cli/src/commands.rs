use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use benchie::facets::{derive, export_facet_gold, score_facet, Facet};
use benchie::gold::{parse_gold, validate, Severity};
use benchie::ingest::{
    default_verb_tags, filter_implicit, naive_extract, read_extractions, read_tagged, to_extractions, ReadOptions,
};
use benchie::profiling::{bucketize_errors, bucketize_sentences, BucketScheme};
use benchie::scoring::{
    dedup_extractions, iaa, match_extractions, reference_from_extractions, reference_from_gold, token_overlap,
    token_overlap_corpus,
};
use benchie::{ExpandOptions, Extraction, GoldCorpus, Triple, DEFAULT_EXPANSION_CAP};
use serde_json::json;

use crate::render;
use crate::{Command, ExtractionArgs, Format};

pub const CAP_VAR: &str = "BENCHIE_EXPANSION_CAP";

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Score {
            gold,
            input,
            facet,
            per_sentence,
            format,
        } => score(&gold, &input, &facet, per_sentence, format),
        Command::Compare {
            gold,
            input,
            reference,
            format,
        } => compare(&gold, &input, reference.as_deref(), format),
        Command::Expand {
            gold,
            facet,
            list,
            export,
            format,
        } => expand(&gold, &facet, list, export, format),
        Command::Validate { gold, format } => validate_cmd(&gold, format),
        Command::Iaa { a, b, format } => iaa_cmd(&a, &b, format),
        Command::Profile {
            gold,
            input,
            tagged,
            scheme,
            case_bounds,
            facet,
            format,
        } => profile(&gold, &input, tagged.as_deref(), &scheme, case_bounds, &facet, format),
        Command::Naive {
            tagged,
            verb_tags,
            output,
        } => naive(&tagged, verb_tags, output.as_deref()),
        Command::Serve { data_dir, port } => serve(data_dir, port),
    }
}

pub fn expand_options() -> Result<ExpandOptions> {
    match std::env::var(CAP_VAR) {
        Ok(raw) => {
            let cap: usize = raw
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .with_context(|| format!("{CAP_VAR}={raw:?} is not a positive integer"))?;
            Ok(ExpandOptions::with_cap(cap))
        }
        Err(_) => Ok(ExpandOptions::with_cap(DEFAULT_EXPANSION_CAP)),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| path.display().to_string())
}

fn load_gold(path: &Path) -> Result<GoldCorpus> {
    parse_gold(&read(path)?).with_context(|| path.display().to_string())
}

pub struct Loaded {
    pub path: PathBuf,
    pub extractions: Vec<Extraction>,
    pub implicit_removed: usize,
}

fn load_extractions(path: &Path, args: &ExtractionArgs, corpus: &GoldCorpus) -> Result<Loaded> {
    let ctx = || path.display().to_string();
    let raw = read_extractions(
        &read(path)?,
        ReadOptions {
            with_confidence: args.with_confidence,
        },
    )
    .with_context(ctx)?;
    let mut extractions = to_extractions(&raw, args.nary).with_context(ctx)?;
    let mut implicit_removed = 0;
    if args.filter_implicit {
        let (kept, removed) = filter_implicit(extractions, corpus).with_context(ctx)?;
        extractions = kept;
        implicit_removed = removed.len();
    }
    Ok(Loaded {
        path: path.to_owned(),
        extractions,
        implicit_removed,
    })
}

fn parse_facets(raw: &[String]) -> Result<Vec<Facet>> {
    let mut out = Vec::new();
    for r in raw {
        let add: Vec<Facet> = if r == "all" {
            Facet::ALL.to_vec()
        } else {
            vec![r.parse::<Facet>()?]
        };
        for f in add {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

fn emit(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn score(gold: &Path, input: &ExtractionArgs, facets: &[String], per_sentence: bool, format: Format) -> Result<ExitCode> {
    let opts = expand_options()?;
    let corpus = load_gold(gold)?;
    let facets = parse_facets(facets)?;
    let mut systems = Vec::new();
    for path in &input.extractions {
        let loaded = load_extractions(path, input, &corpus)?;
        let mut reports = Vec::new();
        for &facet in &facets {
            let mut r = score_facet(&loaded.extractions, &corpus, facet, opts)
                .with_context(|| path.display().to_string())?;
            if !per_sentence {
                r.per_sentence.clear();
            }
            reports.push(r);
        }
        systems.push((loaded, reports));
    }
    match format {
        Format::Json => emit(&json!({
            "gold": gold,
            "systems": systems.iter().map(|(l, reports)| json!({
                "extractions_path": l.path,
                "implicit_removed": l.implicit_removed,
                "reports": reports,
            })).collect::<Vec<_>>(),
        })),
        Format::Text => {
            for (i, (loaded, reports)) in systems.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", render::score_text(loaded, reports, per_sentence));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn compare(gold: &Path, input: &ExtractionArgs, reference: Option<&Path>, format: Format) -> Result<ExitCode> {
    let opts = expand_options()?;
    let corpus = load_gold(gold)?;
    let reference_map = match reference {
        Some(path) => {
            let raw = read_extractions(&read(path)?, ReadOptions::default())
                .with_context(|| path.display().to_string())?;
            reference_from_extractions(&to_extractions(&raw, false).with_context(|| path.display().to_string())?)
        }
        None => reference_from_gold(&corpus, opts)?,
    };
    if input.extractions.len() != 1 {
        bail!("compare takes one extractions file");
    }
    let loaded = load_extractions(&input.extractions[0], input, &corpus)?;
    let default_gold = derive(&corpus, Facet::Default, opts)?;
    let matrix = match_extractions(&loaded.extractions, &default_gold)
        .with_context(|| loaded.path.display().to_string())?;
    let correct: HashMap<(&str, &Triple), bool> = matrix
        .entries
        .iter()
        .map(|m| ((m.extraction.sentence_id.as_str(), &m.extraction.triple), m.is_correct()))
        .collect();
    let (unique, _) = dedup_extractions(&loaded.extractions);
    let empty = Vec::new();
    let rows: Vec<render::CompareRow> = unique
        .iter()
        .map(|e| {
            let t = token_overlap(&e.triple, reference_map.get(&e.sentence_id).unwrap_or(&empty));
            render::CompareRow {
                sentence_id: e.sentence_id.clone(),
                extraction: e.triple.to_string(),
                token_precision: t.precision,
                token_recall: t.recall,
                fact: u8::from(correct.get(&(e.sentence_id.as_str(), &e.triple)).copied().unwrap_or(false)),
            }
        })
        .collect();
    let token = token_overlap_corpus(&loaded.extractions, &reference_map);
    let fact = benchie::scoring::score(&matrix, &default_gold).score;
    let delta = json!({
        "precision": token.precision - fact.precision,
        "recall": token.recall - fact.recall,
        "f1": token.f1 - fact.f1,
    });
    match format {
        Format::Json => emit(&json!({
            "extractions_path": loaded.path,
            "rows": rows,
            "token_overlap": token,
            "fact": fact,
            "delta": delta,
        })),
        Format::Text => print!("{}", render::compare_text(&rows, &token, &fact)),
    }
    Ok(ExitCode::SUCCESS)
}

fn expand(gold: &Path, facet: &str, list: bool, export: bool, format: Format) -> Result<ExitCode> {
    let opts = expand_options()?;
    let corpus = load_gold(gold)?;
    let facet: Facet = facet.parse()?;
    let facet_gold = derive(&corpus, facet, opts).with_context(|| gold.display().to_string())?;
    if export {
        print!("{}", export_facet_gold(&facet_gold, &corpus)?);
        return Ok(ExitCode::SUCCESS);
    }
    let total = facet_gold.member_count();
    let synsets = facet_gold.synsets.len();
    let mean = if synsets == 0 { 0.0 } else { total as f64 / synsets as f64 };
    match format {
        Format::Json => emit(&json!({
            "facet": facet,
            "synsets": synsets,
            "total": total,
            "per_synset": mean,
            "counts": facet_gold.synsets.iter().map(|s| {
                let mut v = json!({"sentence_id": s.sentence_id, "synset_id": s.id, "count": s.members.len()});
                if list {
                    v["members"] = json!(s.members.iter().map(|m| m.to_string()).collect::<Vec<_>>());
                }
                v
            }).collect::<Vec<_>>(),
        })),
        Format::Text => print!("{}", render::expand_text(&facet_gold, list, total, mean)),
    }
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(gold: &Path, format: Format) -> Result<ExitCode> {
    let opts = expand_options()?;
    let corpus = load_gold(gold)?;
    let issues = validate(&corpus, opts);
    let errors = issues.iter().filter(|i| i.severity == Severity::Error).count();
    let warnings = issues.len() - errors;
    match format {
        Format::Json => emit(&json!({"errors": errors, "warnings": warnings, "issues": issues})),
        Format::Text => {
            for i in &issues {
                let sev = match i.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                let synset = i.synset_id.as_deref().map(|s| format!(" {s}")).unwrap_or_default();
                println!("{sev}: {}{synset}: {}", i.sentence_id, i.message);
            }
            println!(
                "{}: {} sentences, {} synsets, {errors} errors, {warnings} warnings",
                gold.display(),
                corpus.sentences().len(),
                corpus.synsets().len()
            );
        }
    }
    Ok(if errors > 0 { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn iaa_cmd(a: &Path, b: &Path, format: Format) -> Result<ExitCode> {
    let opts = expand_options()?;
    let value = iaa(&load_gold(a)?, &load_gold(b)?, opts)
        .with_context(|| format!("{} vs {}", a.display(), b.display()))?;
    match format {
        Format::Json => emit(&json!({"a": a, "b": b, "iaa": value})),
        Format::Text => println!("iaa {value:.2}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn profile(
    gold: &Path,
    input: &ExtractionArgs,
    tagged: Option<&Path>,
    scheme: &str,
    case_bounds: Vec<usize>,
    facet: &str,
    format: Format,
) -> Result<ExitCode> {
    let opts = expand_options()?;
    let corpus = load_gold(gold)?;
    if input.extractions.len() != 1 {
        bail!("profile takes one extractions file");
    }
    let loaded = load_extractions(&input.extractions[0], input, &corpus)?;
    let ctx = || loaded.path.display().to_string();
    let default_gold = derive(&corpus, Facet::Default, opts)?;
    let errors = bucketize_errors(&loaded.extractions, &default_gold).with_context(ctx)?;
    let mut features = Vec::new();
    if let Some(path) = tagged {
        let sentences = read_tagged(&read(path)?).with_context(|| path.display().to_string())?;
        let schemes = match scheme {
            "all" => vec![BucketScheme::length(), BucketScheme::conj(), BucketScheme::case_with(case_bounds)?],
            "case" => vec![BucketScheme::case_with(case_bounds)?],
            other => vec![other.parse::<BucketScheme>()?],
        };
        let facet_gold = derive(&corpus, facet.parse()?, opts)?;
        for s in &schemes {
            let mut fb = bucketize_sentences(&sentences, s).with_context(|| path.display().to_string())?;
            fb.score(&loaded.extractions, &facet_gold)
                .with_context(|| path.display().to_string())?;
            features.push(fb);
        }
    }
    match format {
        Format::Json => emit(&json!({
            "extractions_path": loaded.path,
            "errors": errors,
            "features": features,
            "series": features.iter().map(|f| f.series()).collect::<Vec<_>>(),
        })),
        Format::Text => print!("{}", render::profile_text(&errors, &features)),
    }
    Ok(ExitCode::SUCCESS)
}

fn naive(tagged: &Path, verb_tags: Vec<String>, output: Option<&Path>) -> Result<ExitCode> {
    let sentences = read_tagged(&read(tagged)?).with_context(|| tagged.display().to_string())?;
    let tags = if verb_tags.is_empty() {
        default_verb_tags()
    } else {
        verb_tags.into_iter().collect()
    };
    let mut out = String::new();
    for s in &sentences {
        for e in naive_extract(s, &tags) {
            let t = &e.triple;
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.sentence_id,
                t.subject.join(),
                t.predicate.join(),
                t.object.join()
            ));
        }
    }
    match output {
        Some(path) => std::fs::write(path, out).with_context(|| path.display().to_string())?,
        None => std::io::stdout().write_all(out.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn serve(data_dir: PathBuf, port: u16) -> Result<ExitCode> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(benchie_annotate::serve(data_dir.clone(), port))
        .with_context(|| data_dir.display().to_string())?;
    Ok(ExitCode::SUCCESS)
}
