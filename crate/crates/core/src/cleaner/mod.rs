//! Corpus ingestion, extraction, cleaning rules and translation of cell
//! updates back into documents.

mod corpus;
mod rules;
mod sample;
mod store;
mod table;
mod translate;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::automata::Span;
use crate::charset::CharSet;

pub use corpus::gen_synthetic_corpus;
pub use rules::{apply_rule, iso_date, parse_mapping, update_model, CellUpdate, CleaningRule, Normalizer, RuleFunction};
pub use sample::{random_update, sample_member};
pub use store::{ingest_corpus, split_records, CorpusFormat, DocumentStore, IngestWarning};
pub use table::{extract_table, Cell, ExtractedTable, TableRow};
pub use translate::{
    dsyn, expected_after, round_trip_check, translate_updates, Authorization, DocumentDiff, RoundTripReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CleanError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("table line {line}: {message}")]
    TableFormat { line: usize, message: String },
    #[error("bad rule `{0}`")]
    RuleSyntax(String),
    #[error("{path}:{line}: {message}")]
    RuleFile { path: PathBuf, line: usize, message: String },
    #[error("rule {rule} maps `{old}` to `{new}`, which leaves the column's domain")]
    NotDomainPreserving { rule: String, old: String, new: String },
    #[error("rule {rule} writes `{value}` with undeclared characters {chars}")]
    UndeclaredOutput { rule: String, value: String, chars: CharSet },
    #[error("no column `{0}` in the extracted table")]
    UnknownColumn(String),
    #[error("no document `{0}` in the store")]
    UnknownDocument(String),
    #[error("update for document {doc} names a row that is not in the extracted table")]
    DeadRow { doc: String },
    #[error("document {doc}: span {span} is outside the document")]
    SpanOutOfBounds { doc: String, span: Span },
    #[error("document {doc}: span {span} holds `{found}`, the update expected `{expected}`")]
    Stale { doc: String, span: Span, expected: String, found: String },
    #[error("document {doc}: updates of {first} and {second} overlap")]
    Overlap { doc: String, first: Span, second: Span },
    #[error("program is not verified stable; use --force to translate anyway")]
    NotVerified,
}

impl CleanError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CleanError::Io { path: path.to_path_buf(), message: e.to_string() }
    }
}
