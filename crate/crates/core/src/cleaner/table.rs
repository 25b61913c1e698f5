use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CleanError, DocumentStore};
use crate::algebra::SpannerProgram;
use crate::automata::Span;

/// A span and the text it covers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub span: Span,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TableRow {
    pub doc_id: String,
    pub cells: Vec<Cell>,
}

impl TableRow {
    pub fn spans(&self) -> Vec<Span> {
        self.cells.iter().map(|c| c.span).collect()
    }

    pub fn values(&self) -> Vec<&str> {
        self.cells.iter().map(|c| c.value.as_str()).collect()
    }
}

/// The output relation of a program over a whole store, one row per
/// extracted tuple, tagged with its document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedTable {
    pub program: String,
    /// Output variables; the document id column is implicit.
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl ExtractedTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn rows_of<'a>(&'a self, doc_id: &'a str) -> impl Iterator<Item = &'a TableRow> + 'a {
        self.rows.iter().filter(move |r| r.doc_id == doc_id)
    }

    /// Number of documents with at least one row.
    pub fn matched_documents(&self) -> usize {
        let mut ids: Vec<&str> = self.rows.iter().map(|r| r.doc_id.as_str()).collect();
        ids.dedup();
        ids.len()
    }

    /// Tab-separated: a header, then per row the document id and one
    /// `start,end,"value"` field per column (values JSON-escaped).
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("doc_id");
        for c in &self.columns {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.doc_id);
            for cell in &row.cells {
                let value = serde_json::to_string(&cell.value).expect("strings serialize");
                let _ = write!(out, "\t{},{},{}", cell.span.start, cell.span.end, value);
            }
            out.push('\n');
        }
        out
    }

    /// The spans-free view: document id and values only.
    pub fn strings_tsv(&self) -> String {
        let mut out = String::from("doc_id");
        for c in &self.columns {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.doc_id);
            for cell in &row.cells {
                out.push('\t');
                out.push_str(&serde_json::to_string(&cell.value).expect("strings serialize"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(program: &str, text: &str) -> Result<Self, CleanError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, message: &str| CleanError::TableFormat { line: line + 1, message: message.into() };
        let (_, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
        let mut fields = header.split('\t');
        if fields.next() != Some("doc_id") {
            return Err(bad(0, "header must start with doc_id"));
        }
        let columns: Vec<String> = fields.map(str::to_string).collect();
        let mut rows = Vec::new();
        for (n, line) in lines {
            let mut fields = line.split('\t');
            let doc_id = fields.next().unwrap_or_default().to_string();
            let mut cells = Vec::new();
            for field in fields {
                let mut parts = field.splitn(3, ',');
                let (Some(s), Some(e), Some(v)) = (parts.next(), parts.next(), parts.next()) else {
                    return Err(bad(n, "cell must be start,end,\"value\""));
                };
                let (start, end) = (s.parse().map_err(|_| bad(n, "bad start"))?, e.parse().map_err(|_| bad(n, "bad end"))?);
                if start < 1 || end < start {
                    return Err(bad(n, "invalid span"));
                }
                let value: String = serde_json::from_str(v).map_err(|_| bad(n, "bad value"))?;
                cells.push(Cell { span: Span::new(start, end), value });
            }
            if cells.len() != columns.len() {
                return Err(bad(n, "wrong number of cells"));
            }
            rows.push(TableRow { doc_id, cells });
        }
        Ok(ExtractedTable { program: program.to_string(), columns, rows })
    }
}

/// Runs the program on every document, in store order; rows within a
/// document are sorted by span.
pub fn extract_table(p: &SpannerProgram, store: &DocumentStore) -> ExtractedTable {
    let columns = p.output_schema().to_vec();
    let mut rows = Vec::new();
    for doc in store.documents() {
        rows.extend(extract_document(p, &doc.id, &doc.text));
    }
    ExtractedTable { program: p.node(p.output()).label.clone(), columns, rows }
}

pub(crate) fn extract_document(p: &SpannerProgram, id: &str, text: &str) -> Vec<TableRow> {
    let rel = p.evaluate(text).reorder(p.output_schema());
    rel.rows()
        .map(|spans| TableRow {
            doc_id: id.to_string(),
            cells: spans
                .iter()
                .map(|&span| Cell { span, value: span.text(text).expect("spans lie within the document").to_string() })
                .collect(),
        })
        .collect()
}
