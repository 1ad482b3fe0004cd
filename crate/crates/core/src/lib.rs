//! Fact-level evaluation of open information extraction.
//!
//! Gold standards are written as *fact synsets*: clusters of compact triple
//! patterns whose expansions list every acceptable surface form of one fact.
//! System extractions are scored by exact matching against those
//! expansions, under several facets, with tooling for error profiling.
//!
//! ```
//! use benchie::{fixtures, gold, ingest, facets::{score_facet, Facet}, ExpandOptions};
//!
//! let corpus = gold::parse_gold(fixtures::MITCHELL_GOLD).unwrap();
//! let raw = ingest::read_extractions(&fixtures::extractions_tsv(), Default::default()).unwrap();
//! let extractions = ingest::to_extractions(&raw, false).unwrap();
//! let report = score_facet(&extractions, &corpus, Facet::Default, ExpandOptions::default()).unwrap();
//! assert_eq!((report.score.tp, report.score.fp, report.score.fn_), (1, 3, 3));
//! ```

pub mod error;
pub mod facets;
pub mod fixtures;
pub mod gold;
pub mod ingest;
pub mod model;
pub mod pattern;
pub mod profiling;
pub mod scoring;

pub use error::{Error, Result};
pub use facets::{Facet, FacetGold, GoldKey};
pub use model::{normalize, seq_equal, Extraction, FactSynset, GoldCorpus, Sentence, Token, TokenSeq, Triple};
pub use pattern::{ExpandOptions, SlotPattern, TriplePattern, DEFAULT_EXPANSION_CAP};
pub use scoring::{Score, ScoreReport, TokenOverlapScore};
