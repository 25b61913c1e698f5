use std::collections::BTreeMap;

use serde::Serialize;

use super::{AnalysisError, Node, RegexCV};
use crate::charset::{Alphabet, CharSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exposure {
    Exposed,
    Nested,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableInfo {
    pub name: String,
    pub exposure: Exposure,
    /// Child-index paths from the root to each capture node of this variable.
    pub occurrences: Vec<Vec<usize>>,
}

pub fn classify_variables(r: &RegexCV) -> BTreeMap<String, VariableInfo> {
    fn walk(
        node: &Node,
        path: &mut Vec<usize>,
        enclosed: bool,
        out: &mut BTreeMap<String, VariableInfo>,
    ) {
        let mut inside = enclosed;
        if let Node::Capture(name, _) = node {
            let info = out.entry(name.clone()).or_insert_with(|| VariableInfo {
                name: name.clone(),
                exposure: Exposure::Exposed,
                occurrences: Vec::new(),
            });
            info.occurrences.push(path.clone());
            if enclosed {
                info.exposure = Exposure::Nested;
            }
            inside = true;
        }
        for (i, child) in node.children().iter().enumerate() {
            path.push(i);
            walk(child, path, inside, out);
            path.pop();
        }
    }
    let mut out = BTreeMap::new();
    walk(r.root(), &mut Vec::new(), false, &mut out);
    out
}

fn require_exposed(r: &RegexCV, v: &str) -> Result<(), AnalysisError> {
    match classify_variables(r).get(v) {
        None => Err(AnalysisError::Absent(v.to_string())),
        Some(info) if info.exposure == Exposure::Nested => Err(AnalysisError::Nested(v.to_string())),
        Some(_) => Ok(()),
    }
}

/// Δ(r, v): disjunctions that have `v` in a branch are pulled up over
/// concatenations until they sit at the top of the formula.
pub fn disjunctive_form(r: &RegexCV, v: &str) -> Result<Vec<RegexCV>, AnalysisError> {
    require_exposed(r, v)?;
    Ok(pull_up(r.root(), v)?.into_iter().map(RegexCV::new).collect())
}

fn pull_up(node: &Node, v: &str) -> Result<Vec<Node>, AnalysisError> {
    if !node.mentions(v) {
        return Ok(vec![node.clone()]);
    }
    match node {
        Node::Capture(name, _) if name == v => Ok(vec![node.clone()]),
        Node::Capture(..) => Err(AnalysisError::Nested(v.to_string())),
        Node::Alt(children) => {
            let mut out = Vec::new();
            for child in children {
                out.extend(pull_up(child, v)?);
            }
            Ok(out)
        }
        Node::Concat(children) => {
            let mut acc: Vec<Vec<Node>> = vec![Vec::new()];
            for child in children {
                let options = pull_up(child, v)?;
                let mut next = Vec::with_capacity(acc.len() * options.len());
                for prefix in &acc {
                    for option in &options {
                        let mut row = prefix.clone();
                        row.push(option.clone());
                        next.push(row);
                    }
                }
                acc = next;
            }
            Ok(acc.into_iter().map(Node::concat).collect())
        }
        Node::Star(_) => Err(AnalysisError::UnderStar(v.to_string())),
        _ => unreachable!("leaf nodes carry no captures"),
    }
}

/// The sub-formula captured by `v` in `r`, with inner captures erased.
/// Returns the first occurrence; Δ disjuncts have exactly one.
pub fn enclosed_regex(r: &RegexCV, v: &str) -> Option<RegexCV> {
    fn find<'a>(node: &'a Node, v: &str) -> Option<&'a Node> {
        if let Node::Capture(name, body) = node {
            if name == v {
                return Some(body);
            }
        }
        node.children().iter().find_map(|c| find(c, v))
    }
    find(r.root(), v).map(|body| RegexCV::new(body.filter_captures(&|_| false)))
}

/// Whether a node matches exactly single characters (a character class).
pub fn is_unigram_class(node: &Node) -> bool {
    match node {
        Node::Char(_) | Node::Range(..) | Node::Any | Node::Minus(..) => true,
        Node::Alt(children) => children.iter().all(is_unigram_class),
        _ => false,
    }
}

/// The characters of a unigram class, intersected with the alphabet.
pub fn unigram_class(node: &Node, sigma: Alphabet) -> CharSet {
    let set = match node {
        Node::Char(c) => CharSet::singleton(*c),
        Node::Range(lo, hi) => CharSet::range(*lo, *hi),
        Node::Any => sigma.chars(),
        Node::Minus(base, c) => unigram_class(base, sigma).minus(CharSet::singleton(*c)),
        Node::Alt(children) => children
            .iter()
            .fold(CharSet::EMPTY, |acc, child| acc.union(unigram_class(child, sigma))),
        _ => CharSet::EMPTY,
    };
    set.intersect(sigma.chars())
}

fn is_unigram_star(node: &Node) -> bool {
    matches!(node, Node::Star(body) if is_unigram_class(body))
}

/// Stars over single-character classes that are not inside any capture.
pub fn uncovered_unigrams(r: &RegexCV, sigma: Alphabet) -> Vec<(Vec<usize>, CharSet)> {
    fn walk(node: &Node, path: &mut Vec<usize>, sigma: Alphabet, out: &mut Vec<(Vec<usize>, CharSet)>) {
        match node {
            Node::Capture(..) => {}
            Node::Star(body) if is_unigram_class(body) => {
                out.push((path.clone(), unigram_class(body, sigma)));
            }
            _ => {
                for (i, child) in node.children().iter().enumerate() {
                    path.push(i);
                    walk(child, path, sigma, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(r.root(), &mut Vec::new(), sigma, &mut out);
    out
}

/// Characters that occur in at least one word of the language (captures erased).
pub fn char_set(r: &RegexCV, sigma: Alphabet) -> CharSet {
    fn walk(node: &Node, sigma: Alphabet) -> (bool, CharSet) {
        match node {
            Node::Empty => (false, CharSet::EMPTY),
            Node::Epsilon => (true, CharSet::EMPTY),
            Node::Char(_) | Node::Range(..) | Node::Any | Node::Minus(..) => {
                let set = unigram_class(node, sigma);
                (!set.is_empty(), set)
            }
            Node::Alt(children) => children.iter().fold((false, CharSet::EMPTY), |acc, child| {
                let (ne, set) = walk(child, sigma);
                (acc.0 || ne, acc.1.union(set))
            }),
            Node::Concat(children) => {
                let mut set = CharSet::EMPTY;
                for child in children {
                    let (ne, s) = walk(child, sigma);
                    if !ne {
                        return (false, CharSet::EMPTY);
                    }
                    set = set.union(s);
                }
                (true, set)
            }
            Node::Star(body) => (true, walk(body, sigma).1),
            Node::Capture(_, body) => walk(body, sigma),
        }
    }
    walk(r.root(), sigma).1
}

/// One Δ disjunct with its contextual regions wrapped in fresh variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextualizedDisjunct {
    pub formula: RegexCV,
    pub contexts: Vec<String>,
}

/// C_v(r) as a list of functional disjuncts, one per element of Δ(r, v).
///
/// Within each disjunct, maximal runs of top-level factors that are neither
/// captures nor unigram stars become one context capture `c1`, `c2`, ...
/// Context names are unique across disjuncts and avoid the formula's own
/// variables.
pub fn contextualize_disjuncts(
    r: &RegexCV,
    v: &str,
) -> Result<Vec<ContextualizedDisjunct>, AnalysisError> {
    let taken = r.svars();
    let mut counter = 0usize;
    let mut fresh = || loop {
        counter += 1;
        let name = format!("c{counter}");
        if !taken.contains(&name) {
            return name;
        }
    };
    let mut out = Vec::new();
    for disjunct in disjunctive_form(r, v)? {
        let factors = match disjunct.into_root() {
            Node::Concat(children) => children,
            other => vec![other],
        };
        let mut parts = Vec::new();
        let mut pending: Vec<Node> = Vec::new();
        let mut contexts = Vec::new();
        let mut flush = |pending: &mut Vec<Node>, parts: &mut Vec<Node>, contexts: &mut Vec<String>| {
            if !pending.is_empty() {
                let name = fresh();
                contexts.push(name.clone());
                parts.push(Node::capture(name, Node::concat(std::mem::take(pending))));
            }
        };
        for factor in factors {
            if matches!(factor, Node::Capture(..)) || is_unigram_star(&factor) {
                flush(&mut pending, &mut parts, &mut contexts);
                parts.push(factor);
            } else {
                pending.push(factor);
            }
        }
        flush(&mut pending, &mut parts, &mut contexts);
        out.push(ContextualizedDisjunct { formula: RegexCV::new(Node::concat(parts)), contexts });
    }
    Ok(out)
}

/// C_v(r): the disjunction of [`contextualize_disjuncts`].
pub fn contextualize(r: &RegexCV, v: &str) -> Result<RegexCV, AnalysisError> {
    let parts = contextualize_disjuncts(r, v)?;
    Ok(RegexCV::new(Node::alt(parts.into_iter().map(|d| d.formula.into_root()).collect())))
}
