//! `benchie`: fact-level scoring, comparison, gold tooling and the
//! annotation service.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "benchie", version, about = "Fact-level evaluation of open information extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Clone, Debug)]
pub struct ExtractionArgs {
    /// Extraction TSV: sentence_id, subject, predicate, object[, more slots][, confidence]
    #[arg(short, long = "extractions", required = true, num_args = 1..)]
    pub extractions: Vec<PathBuf>,
    /// Collapse extra slots into the object instead of rejecting the line
    #[arg(long)]
    pub nary: bool,
    /// The last column is a confidence in [0, 1]
    #[arg(long)]
    pub with_confidence: bool,
    /// Drop extractions using tokens absent from the sentence
    #[arg(long)]
    pub filter_implicit: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Score extractions against a gold file
    Score {
        #[arg(short, long)]
        gold: PathBuf,
        #[command(flatten)]
        input: ExtractionArgs,
        /// default, E, C, M or all; repeatable
        #[arg(long, default_value = "default")]
        facet: Vec<String>,
        /// Include per-sentence counts
        #[arg(long)]
        per_sentence: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Fact-level and token-overlap scores side by side
    Compare {
        #[arg(short, long)]
        gold: PathBuf,
        #[command(flatten)]
        input: ExtractionArgs,
        /// Reference triples for token overlap (extraction TSV); defaults to the expanded gold
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Expansion counts per synset
    Expand {
        #[arg(short, long)]
        gold: PathBuf,
        #[arg(long, default_value = "default")]
        facet: String,
        /// Print every expanded member
        #[arg(long)]
        list: bool,
        /// Write the facet gold in the gold file format instead
        #[arg(long)]
        export: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a gold file; exits nonzero if any error is found
    Validate {
        #[arg(short, long)]
        gold: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Agreement between two annotations of the same sentences
    Iaa {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Error buckets and scores by sentence feature
    Profile {
        #[arg(short, long)]
        gold: PathBuf,
        #[command(flatten)]
        input: ExtractionArgs,
        /// CoNLL-U or token/POS/deprel rows; enables feature buckets
        #[arg(long)]
        tagged: Option<PathBuf>,
        /// length, conj, case or all
        #[arg(long, default_value = "all")]
        scheme: String,
        /// Inclusive upper bounds of the case-marker buckets
        #[arg(long, value_delimiter = ',', default_value = "1,3")]
        case_bounds: Vec<usize>,
        /// Facet for the feature-bucket scores
        #[arg(long, default_value = "default")]
        facet: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Baseline extractor: one triple per verb
    Naive {
        #[arg(long)]
        tagged: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "VERB")]
        verb_tags: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the annotation service
    Serve {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
