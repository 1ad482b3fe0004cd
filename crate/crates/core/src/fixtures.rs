//! The worked example sentence used throughout the docs and tests: its
//! fact-synset gold, the single token-overlap reference triple, and four
//! system extractions.

/// Sentence id of the worked example.
pub const S1: &str = "S1";

/// Tokenized worked-example sentence.
pub const S1_TEXT: &str =
    "Sen. Mitchell is confident he has sufficient votes to block such a measure with procedural actions .";

/// Four fact synsets for `S1`. The second `f4` pattern places "with" in
/// the object and is flagged as not entity-clean.
pub const MITCHELL_GOLD: &str = "\
# worked example: four fact synsets
sent\tS1\tSen. Mitchell is confident he has sufficient votes to block such a measure with procedural actions .
fact\tS1\tf1\t{ Sen. Mitchell | he }\tis\tconfident [ he has sufficient votes to block such a measure with procedural actions ]
fact\tS1\tf2\t{ Sen. Mitchell | he }\tis confident he has\tsufficient votes
fact\tS1\tf2\t{ Sen. Mitchell | he }\tis confident he has\tsufficient votes to block [ such ] [ a ] measure
fact\tS1\tf3\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block\t[ such ] [ a ] measure
fact\tS1\tf3\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ]\t[ a ] measure
fact\tS1\tf3\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ] [ a ]\tmeasure
fact\tS1\tf4\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ] [ a ] measure with\tprocedural actions
fact\tS1\tf4\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ] [ a ] measure\twith procedural actions\tno-entity
";

/// The single reference triple for `S1` used by the token-overlap scorer.
pub const REFERENCE_TRIPLE: (&str, &str, &str) = (
    "Sen. Mitchell",
    "is confident he has",
    "sufficient votes to block such a measure with procedural actions",
);

/// Extractions t1..t4 for `S1`; only t4 states a gold fact.
pub const EXTRACTIONS: [(&str, &str, &str); 4] = [
    ("Sen. Mitchell", "is confident he has", "sufficient"),
    ("Sen. Mitchell", "is confident he has", "sufficient actions"),
    ("Sen. Mitchell", "is confident he has", "sufficient procedural actions"),
    ("Sen. Mitchell", "is confident he has", "sufficient votes"),
];

/// `EXTRACTIONS` in the extraction TSV format.
pub fn extractions_tsv() -> String {
    EXTRACTIONS
        .iter()
        .map(|(s, p, o)| format!("{S1}\t{s}\t{p}\t{o}\n"))
        .collect()
}
