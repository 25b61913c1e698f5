//! Regular expressions with capture variables.
//!
//! The tree mirrors the formula grammar directly: character leaves, the
//! alphabet token, subtraction, disjunction, concatenation, star and
//! variable capture. [`parse_regex_cv`] reads the surface syntax and the
//! `Display` impl writes it back in a form that re-parses to the same tree.

mod analysis;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::charset::show_char;

pub use analysis::{
    char_set, classify_variables, contextualize, contextualize_disjuncts, disjunctive_form,
    enclosed_regex, is_unigram_class, uncovered_unigrams, unigram_class, ContextualizedDisjunct,
    Exposure, VariableInfo,
};
pub use parse::{parse_regex_cv, parse_with_macros, Macros};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    /// 0-based character offset into the source text.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("variable `{0}` does not occur in the formula")]
    Absent(String),
    #[error("variable `{0}` is nested inside another capture")]
    Nested(String),
    #[error("variable `{0}` occurs under a star")]
    UnderStar(String),
}

/// A node of the formula tree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    /// The empty language.
    Empty,
    Epsilon,
    Char(u8),
    /// Inclusive character range.
    Range(u8, u8),
    /// Any character of the alphabet.
    Any,
    /// The class of `base` minus one character; `base` is `Any` or another `Minus`.
    Minus(Box<Node>, u8),
    Alt(Vec<Node>),
    Concat(Vec<Node>),
    Star(Box<Node>),
    Capture(String, Box<Node>),
}

impl Node {
    /// Concatenation that flattens nested concatenations.
    pub fn concat(parts: Vec<Node>) -> Node {
        let mut flat = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                Node::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Node::Epsilon,
            1 => flat.pop().unwrap(),
            _ => Node::Concat(flat),
        }
    }

    /// Disjunction that flattens nested disjunctions.
    pub fn alt(parts: Vec<Node>) -> Node {
        let mut flat = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                Node::Alt(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Node::Empty,
            1 => flat.pop().unwrap(),
            _ => Node::Alt(flat),
        }
    }

    pub fn star(body: Node) -> Node {
        Node::Star(Box::new(body))
    }

    pub fn capture(name: impl Into<String>, body: Node) -> Node {
        Node::Capture(name.into(), Box::new(body))
    }

    pub fn literal(text: &str) -> Node {
        Node::concat(text.bytes().map(Node::Char).collect())
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::Alt(c) | Node::Concat(c) => c,
            Node::Star(b) | Node::Capture(_, b) | Node::Minus(b, _) => std::slice::from_ref(b),
            _ => &[],
        }
    }

    /// Whether a capture of `var` occurs anywhere below (or at) this node.
    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Node::Capture(name, body) => name == var || body.mentions(var),
            Node::Alt(c) | Node::Concat(c) => c.iter().any(|n| n.mentions(var)),
            Node::Star(b) => b.mentions(var),
            _ => false,
        }
    }

    pub fn has_captures(&self) -> bool {
        match self {
            Node::Capture(..) => true,
            Node::Alt(c) | Node::Concat(c) => c.iter().any(Node::has_captures),
            Node::Star(b) => b.has_captures(),
            _ => false,
        }
    }

    /// Copy of the tree keeping only captures whose names satisfy `keep`.
    pub fn filter_captures(&self, keep: &dyn Fn(&str) -> bool) -> Node {
        match self {
            Node::Capture(name, body) => {
                let body = body.filter_captures(keep);
                if keep(name) {
                    Node::capture(name.clone(), body)
                } else {
                    body
                }
            }
            Node::Alt(c) => Node::alt(c.iter().map(|n| n.filter_captures(keep)).collect()),
            Node::Concat(c) => Node::concat(c.iter().map(|n| n.filter_captures(keep)).collect()),
            Node::Star(b) => Node::star(b.filter_captures(keep)),
            other => other.clone(),
        }
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        if let Node::Capture(name, _) = self {
            if !out.contains(name) {
                out.push(name.clone());
            }
        }
        for child in self.children() {
            child.collect_vars(out);
        }
    }

    fn starts_with_capture(&self) -> bool {
        match self {
            Node::Capture(..) => true,
            Node::Concat(c) => c.first().is_some_and(Node::starts_with_capture),
            Node::Star(b) => b.starts_with_capture(),
            _ => false,
        }
    }

    fn is_atom(&self) -> bool {
        !matches!(self, Node::Alt(_) | Node::Concat(_))
    }
}

/// A parsed extraction formula.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RegexCV {
    root: Node,
}

impl RegexCV {
    pub fn new(root: Node) -> Self {
        RegexCV { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    /// Capture variables in order of first occurrence.
    pub fn svars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.root.collect_vars(&mut out);
        out
    }

    /// The same language with every capture removed.
    pub fn erase_captures(&self) -> RegexCV {
        RegexCV::new(self.root.filter_captures(&|_| false))
    }

    /// Keeps captures of the listed variables, erasing the rest.
    pub fn project(&self, keep: &[&str]) -> RegexCV {
        RegexCV::new(self.root.filter_captures(&|name| keep.contains(&name)))
    }
}

/// The set of formula variables, as a sorted set.
pub fn svars(r: &RegexCV) -> std::collections::BTreeSet<String> {
    r.svars().into_iter().collect()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

const SPECIAL: &[u8] = b"\\()[]{}|*+?@#-";

fn write_char(out: &mut String, c: u8) {
    if SPECIAL.contains(&c) {
        out.push('\\');
        out.push(c as char);
    } else {
        out.push_str(&show_char(c));
    }
}

fn write_class_char(out: &mut String, c: u8) {
    if matches!(c, b'\\' | b']' | b'-' | b',' | b'[') {
        out.push('\\');
        out.push(c as char);
    } else {
        out.push_str(&show_char(c));
    }
}

fn write_node(out: &mut String, node: &Node) {
    match node {
        Node::Empty => out.push('∅'),
        Node::Epsilon => out.push('ε'),
        Node::Char(c) => write_char(out, *c),
        Node::Range(lo, hi) => {
            out.push('[');
            write_class_char(out, *lo);
            out.push('-');
            write_class_char(out, *hi);
            out.push(']');
        }
        Node::Any => out.push('Σ'),
        Node::Minus(base, c) => {
            write_node(out, base);
            out.push('−');
            write_char(out, *c);
        }
        Node::Alt(children) => {
            out.push('(');
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ∨ ");
                }
                write_node(out, child);
            }
            out.push(')');
        }
        Node::Concat(children) => {
            for child in children {
                if child.starts_with_capture() && out.chars().last().is_some_and(is_ident_char) {
                    out.push(' ');
                }
                write_node(out, child);
            }
        }
        Node::Star(body) => {
            if body.is_atom() {
                write_node(out, body);
            } else {
                out.push('(');
                write_node(out, body);
                out.push(')');
            }
            out.push('*');
        }
        Node::Capture(name, body) => {
            out.push_str(name);
            out.push('{');
            write_node(out, body);
            out.push('}');
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        match self {
            // A bare top-level disjunction needs no parentheses.
            Node::Alt(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" ∨ ");
                    }
                    write_node(&mut out, child);
                }
            }
            other => write_node(&mut out, other),
        }
        f.write_str(&out)
    }
}

impl fmt::Display for RegexCV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for RegexCV {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_regex_cv(s)
    }
}
