#![allow(dead_code)]

pub mod oracle;

use spanclean::automata::{Span, SpanRelation};
use spanclean::regex_cv::{parse_regex_cv, RegexCV};

pub fn rx(src: &str) -> RegexCV {
    parse_regex_cv(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn sp(start: u32, end: u32) -> Span {
    Span::new(start, end)
}

/// Rows of `rel` reordered to the given column order.
pub fn rows_in(rel: &SpanRelation, order: &[&str]) -> Vec<Vec<Span>> {
    let order: Vec<String> = order.iter().map(|s| s.to_string()).collect();
    rel.reorder(&order).rows().cloned().collect()
}
