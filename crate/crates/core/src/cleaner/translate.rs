use std::collections::BTreeMap;

use serde::Serialize;

use super::table::extract_document;
use super::{Cell, CellUpdate, CleanError, DocumentStore, ExtractedTable, TableRow};
use crate::algebra::SpannerProgram;
use crate::automata::Span;
use crate::verifier::VerificationReport;

/// Replaces the text under `span` by `new`; `None` if the span exceeds
/// the document.
pub fn dsyn(text: &str, span: Span, new: &str) -> Option<String> {
    let (s, e) = (span.start as usize - 1, span.end as usize - 1);
    if e > text.len() || s > e {
        return None;
    }
    let mut out = String::with_capacity(text.len() - (e - s) + new.len());
    out.push_str(&text[..s]);
    out.push_str(new);
    out.push_str(&text[e..]);
    Some(out)
}

/// Permission to write updates back into documents.
#[derive(Clone, Copy, Debug)]
pub enum Authorization<'a> {
    /// Allowed only if the report says the program is stable.
    Verified(&'a VerificationReport),
    /// Diagnostic runs of unverified programs.
    Forced,
}

/// One document edit: the text under `span` becomes `new`.
type Edit = (Span, String);

fn overlapping(a: Span, b: Span) -> bool {
    if a == b {
        return true;
    }
    let inside = |p: u32, s: Span| s.start < p && p < s.end;
    (a.start < b.end && b.start < a.end) || (a.is_empty() && inside(a.start, b)) || (b.is_empty() && inside(b.start, a))
}

/// Edits per document: each update must name a live row; identical
/// edits collapse; overlapping ones are rejected.
fn collect_edits(table: &ExtractedTable, updates: &[CellUpdate]) -> Result<BTreeMap<String, Vec<Edit>>, CleanError> {
    let mut by_doc: BTreeMap<String, Vec<Edit>> = BTreeMap::new();
    for u in updates {
        let col = table.column(&u.column).ok_or_else(|| CleanError::UnknownColumn(u.column.clone()))?;
        if !table.rows_of(&u.doc_id).any(|r| r.spans() == u.row) {
            return Err(CleanError::DeadRow { doc: u.doc_id.clone() });
        }
        by_doc.entry(u.doc_id.clone()).or_default().push((u.row[col], u.new.clone()));
    }
    for (doc, edits) in &mut by_doc {
        edits.sort();
        edits.dedup();
        for (i, a) in edits.iter().enumerate() {
            if let Some(b) = edits[i + 1..].iter().find(|b| overlapping(a.0, b.0)) {
                return Err(CleanError::Overlap { doc: doc.clone(), first: a.0, second: b.0 });
            }
        }
    }
    Ok(by_doc)
}

/// Writes the updates into a new version of the store. Per document,
/// edits apply in descending start order so pending spans stay valid.
/// Any error leaves the store untouched.
pub fn translate_updates(
    store: &DocumentStore,
    table: &ExtractedTable,
    updates: &[CellUpdate],
    auth: Authorization<'_>,
) -> Result<DocumentStore, CleanError> {
    if let Authorization::Verified(report) = auth {
        if !report.stable {
            return Err(CleanError::NotVerified);
        }
    }
    let mut replaced = BTreeMap::new();
    let expected: BTreeMap<(&str, Span), &str> = updates
        .iter()
        .filter_map(|u| Some(((u.doc_id.as_str(), u.row[table.column(&u.column)?]), u.old.as_str())))
        .collect();
    for (doc, mut edits) in collect_edits(table, updates)? {
        let text = &store.get(&doc).ok_or_else(|| CleanError::UnknownDocument(doc.clone()))?.text;
        for (span, _) in &edits {
            let found = span.text(text).ok_or(CleanError::SpanOutOfBounds { doc: doc.clone(), span: *span })?;
            let old = expected[&(doc.as_str(), *span)];
            if found != old {
                return Err(CleanError::Stale { doc, span: *span, expected: old.to_string(), found: found.to_string() });
            }
        }
        edits.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out = text.clone();
        for (span, new) in &edits {
            out = dsyn(&out, *span, new).expect("bounds checked against the original text");
        }
        replaced.insert(doc, out);
    }
    Ok(store.next_version(replaced))
}

/// Where a cell lands after a set of non-overlapping edits.
enum Mapped {
    Moved(Span),
    /// The cell is itself edited.
    Replaced(Span, String),
    /// An edit cuts across the cell's boundary.
    Lost,
}

fn map_cell(span: Span, edits: &[Edit]) -> Mapped {
    let delta = |(s, new): &Edit| new.len() as i64 - s.len() as i64;
    let mut start = span.start as i64;
    let mut end = span.end as i64;
    let mut replacement = None;
    for edit @ (d, new) in edits {
        if *d == span {
            replacement = Some(new.clone());
        } else if d.end <= span.start {
            start += delta(edit);
            end += delta(edit);
        } else if d.start >= span.end {
        } else if span.start <= d.start && d.end <= span.end {
            end += delta(edit);
        } else {
            return Mapped::Lost;
        }
    }
    match replacement {
        Some(new) => Mapped::Replaced(Span::new(start as u32, start as u32 + new.len() as u32), new),
        None => Mapped::Moved(Span::new(start as u32, end as u32)),
    }
}

/// The rows the program should extract from `after_text` if the edits
/// preserve stability: `rows` with edited cells replaced and later spans
/// shifted. The second list holds rows that cannot survive unchanged
/// because an edit cuts across or into one of their other cells.
pub fn expected_after(rows: &[TableRow], edits: &[(Span, String)], after_text: &str) -> (Vec<TableRow>, Vec<TableRow>) {
    let (mut kept, mut lost) = (Vec::new(), Vec::new());
    'rows: for row in rows {
        let mut cells = Vec::with_capacity(row.cells.len());
        for cell in &row.cells {
            let mapped = match map_cell(cell.span, edits) {
                Mapped::Replaced(span, value) => Cell { span, value },
                Mapped::Moved(span) => match span.text(after_text) {
                    Some(v) if v == cell.value => Cell { span, value: v.to_string() },
                    _ => {
                        lost.push(row.clone());
                        continue 'rows;
                    }
                },
                Mapped::Lost => {
                    lost.push(row.clone());
                    continue 'rows;
                }
            };
            cells.push(mapped);
        }
        kept.push(TableRow { doc_id: row.doc_id.clone(), cells });
    }
    (kept, lost)
}

/// Differences between expected and re-extracted rows of one document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DocumentDiff {
    pub doc_id: String,
    /// Extracted but not expected.
    pub gained: Vec<TableRow>,
    /// Expected but not extracted.
    pub lost: Vec<TableRow>,
    /// Expected and extracted rows with the same spans but different values.
    pub mismatched: Vec<(TableRow, TableRow)>,
}

impl DocumentDiff {
    pub fn is_empty(&self) -> bool {
        self.gained.is_empty() && self.lost.is_empty() && self.mismatched.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub documents_checked: usize,
    pub updates: usize,
    /// Only documents that differ.
    pub diffs: Vec<DocumentDiff>,
}

impl RoundTripReport {
    pub fn exact(&self) -> bool {
        self.diffs.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = if self.exact() {
            format!("exact match: {} documents, {} updates\n", self.documents_checked, self.updates)
        } else {
            format!(
                "mismatch: {} of {} documents differ ({} updates)\n",
                self.diffs.len(),
                self.documents_checked,
                self.updates
            )
        };
        let show = |r: &TableRow| {
            r.cells.iter().map(|c| format!("{} {:?}", c.span, c.value)).collect::<Vec<_>>().join(", ")
        };
        for d in &self.diffs {
            out.push_str(&format!("document {}\n", d.doc_id));
            for r in &d.lost {
                out.push_str(&format!("  lost     {}\n", show(r)));
            }
            for r in &d.gained {
                out.push_str(&format!("  gained   {}\n", show(r)));
            }
            for (e, a) in &d.mismatched {
                out.push_str(&format!("  expected {}\n  found    {}\n", show(e), show(a)));
            }
        }
        out
    }
}

/// Multiset difference `a - b`.
fn bag_minus(a: &[TableRow], b: &[TableRow]) -> Vec<TableRow> {
    let mut counts: BTreeMap<&TableRow, usize> = BTreeMap::new();
    for r in b {
        *counts.entry(r).or_default() += 1;
    }
    a.iter()
        .filter(|r| match counts.get_mut(r) {
            Some(n) if *n > 0 => {
                *n -= 1;
                false
            }
            _ => true,
        })
        .cloned()
        .collect()
}

/// Re-extracts every updated document of `after` and compares it with the
/// `before` table transformed by the updates.
pub fn round_trip_check(
    p: &SpannerProgram,
    before: &ExtractedTable,
    after: &DocumentStore,
    updates: &[CellUpdate],
) -> RoundTripReport {
    let mut report = RoundTripReport { updates: updates.len(), ..Default::default() };
    let edits = match collect_edits(before, updates) {
        Ok(e) => e,
        Err(_) => {
            // Updates that cannot be translated are checked as if each
            // document received them anyway.
            let mut by_doc: BTreeMap<String, Vec<Edit>> = BTreeMap::new();
            for u in updates {
                if let Some(c) = before.column(&u.column) {
                    by_doc.entry(u.doc_id.clone()).or_default().push((u.row[c], u.new.clone()));
                }
            }
            by_doc
        }
    };
    for (doc, edits) in &edits {
        let Some(after_doc) = after.get(doc) else { continue };
        report.documents_checked += 1;
        let rows: Vec<TableRow> = before.rows_of(doc).cloned().collect();
        let (expected, unmappable) = expected_after(&rows, edits, &after_doc.text);
        let actual = extract_document(p, doc, &after_doc.text);
        let mut lost = bag_minus(&expected, &actual);
        let mut gained = bag_minus(&actual, &expected);
        let mut mismatched = Vec::new();
        lost.retain(|e| match gained.iter().position(|g| g.spans() == e.spans()) {
            Some(i) => {
                mismatched.push((e.clone(), gained.remove(i)));
                false
            }
            None => true,
        });
        lost.extend(unmappable);
        let diff = DocumentDiff { doc_id: doc.clone(), gained, lost, mismatched };
        if !diff.is_empty() {
            report.diffs.push(diff);
        }
    }
    report
}
