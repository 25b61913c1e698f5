//! Variable-set automata.
//!
//! Formulas compile to a Thompson automaton with ε, character and
//! open/close edges, which is then normalized: every run performs the
//! operations of one offset as a single edge labelled with an [`OpSet`],
//! operation edges never follow each other, every run that reaches an
//! accepting state opens and closes each variable exactly once, and every
//! state lies on some accepting path.

mod emptiness;
mod eval;
mod lang;
mod normalize;
mod ops;
mod thompson;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charset::{Alphabet, CharSet};
use crate::regex_cv::RegexCV;

pub use emptiness::{emptiness, Emptiness, Witness};
pub use eval::{match_all, Evaluation};
pub use lang::{Nfa, Inclusion};
pub use ops::{join_a, project_a, rename_a, union_a};

/// Variables per automaton are limited by the 64-bit operation sets.
pub const MAX_VARS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("automaton is not functional")]
    NotFunctional,
    #[error("too many variables ({0}); at most {MAX_VARS} are supported")]
    TooManyVariables(usize),
    #[error("union operands are not union-compatible: {left:?} vs {right:?}")]
    NotUnionCompatible { left: Vec<String>, right: Vec<String> },
    #[error("rename maps two variables to `{0}`")]
    RenameCollision(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operands use different alphabets")]
    AlphabetMismatch,
}

/// Half-open 1-based offset interval `[start, end⟩`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub fn new(start: u32, end: u32) -> Self {
        debug_assert!(1 <= start && start <= end);
        Span { start, end }
    }

    pub fn len(self) -> u32 {
        self.end - self.start
    }

    pub fn is_empty(self) -> bool {
        self.start == self.end
    }

    /// The covered substring; `None` if the span exceeds the text.
    pub fn text(self, doc: &str) -> Option<&str> {
        let (s, e) = (self.start as usize - 1, self.end as usize - 1);
        doc.get(s..e)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}⟩", self.start, self.end)
    }
}

/// A document of the corpus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document { id: id.into(), text: text.into() }
    }

    /// Length in characters (documents are ASCII).
    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }
}

/// A set of span tuples over named columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpanRelation {
    columns: Vec<String>,
    rows: BTreeSet<Vec<Span>>,
}

impl SpanRelation {
    pub fn new(columns: Vec<String>) -> Self {
        SpanRelation { columns, rows: BTreeSet::new() }
    }

    pub fn with_rows(columns: Vec<String>, rows: impl IntoIterator<Item = Vec<Span>>) -> Self {
        let mut rel = SpanRelation::new(columns);
        for row in rows {
            rel.insert(row);
        }
        rel
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn insert(&mut self, row: Vec<Span>) -> bool {
        assert_eq!(row.len(), self.columns.len(), "row arity must match the columns");
        self.rows.insert(row)
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<Span>> {
        self.rows.iter()
    }

    pub fn contains(&self, row: &[Span]) -> bool {
        self.rows.contains(row)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Same relation with columns permuted into `order` (a permutation of the columns).
    pub fn reorder(&self, order: &[String]) -> SpanRelation {
        let idx: Vec<usize> = order
            .iter()
            .map(|c| self.column(c).unwrap_or_else(|| panic!("unknown column {c}")))
            .collect();
        assert_eq!(idx.len(), self.columns.len());
        SpanRelation::with_rows(
            order.to_vec(),
            self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()),
        )
    }

    pub fn project(&self, keep: &[String]) -> SpanRelation {
        let idx: Vec<usize> = keep.iter().filter_map(|c| self.column(c)).collect();
        let columns = idx.iter().map(|&i| self.columns[i].clone()).collect();
        SpanRelation::with_rows(columns, self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()))
    }

    /// Set union; `other` is aligned to this relation's column order.
    pub fn union(&self, other: &SpanRelation) -> SpanRelation {
        let other = other.reorder(&self.columns);
        let mut out = self.clone();
        out.rows.extend(other.rows);
        out
    }

    /// Natural join on shared column names; output columns are this
    /// relation's followed by the other's non-shared ones.
    pub fn join(&self, other: &SpanRelation) -> SpanRelation {
        let shared: Vec<(usize, usize)> = self
            .columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| other.column(c).map(|j| (i, j)))
            .collect();
        let extra: Vec<usize> =
            (0..other.columns.len()).filter(|j| !shared.iter().any(|&(_, s)| s == *j)).collect();
        let mut columns = self.columns.clone();
        columns.extend(extra.iter().map(|&j| other.columns[j].clone()));
        let mut out = SpanRelation::new(columns);
        for a in &self.rows {
            for b in &other.rows {
                if shared.iter().all(|&(i, j)| a[i] == b[j]) {
                    let mut row = a.clone();
                    row.extend(extra.iter().map(|&j| b[j]));
                    out.rows.insert(row);
                }
            }
        }
        out
    }

    pub fn rename(&self, mapping: &dyn Fn(&str) -> String) -> SpanRelation {
        SpanRelation { columns: self.columns.iter().map(|c| mapping(c)).collect(), rows: self.rows.clone() }
    }

    pub fn retain(&mut self, keep: impl FnMut(&Vec<Span>) -> bool) {
        self.rows.retain(keep);
    }
}

impl fmt::Display for SpanRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.columns.join("\t"))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

/// Open/close operations performed at one offset: bit `2i` opens variable
/// `i`, bit `2i + 1` closes it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct OpSet(pub u64);

impl OpSet {
    pub const fn open(var: usize) -> u64 {
        1 << (2 * var)
    }

    pub const fn close(var: usize) -> u64 {
        1 << (2 * var + 1)
    }

    pub fn opens(self, var: usize) -> bool {
        self.0 & Self::open(var) != 0
    }

    pub fn closes(self, var: usize) -> bool {
        self.0 & Self::close(var) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

pub type StateId = u32;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct State {
    pub accepting: bool,
    pub chars: Vec<(CharSet, StateId)>,
    pub ops: Vec<(OpSet, StateId)>,
}

/// A normalized variable-set automaton.
#[derive(Clone, Debug)]
pub struct VSetAutomaton {
    alphabet: Alphabet,
    vars: Vec<String>,
    states: Vec<State>,
    initial: StateId,
    functional: bool,
}

impl VSetAutomaton {
    /// Compiles a formula over the given alphabet.
    pub fn compile(r: &RegexCV, alphabet: Alphabet) -> Result<Self, AutomatonError> {
        let thompson = thompson::Thompson::build(r, alphabet)?;
        let functional = thompson.is_functional();
        let mut aut = normalize::normalize(&thompson, alphabet);
        aut.functional = functional;
        Ok(aut)
    }

    pub(crate) fn from_parts(
        alphabet: Alphabet,
        vars: Vec<String>,
        states: Vec<State>,
        initial: StateId,
        functional: bool,
    ) -> Self {
        let mut aut = VSetAutomaton { alphabet, vars, states, initial, functional };
        aut.prune();
        aut
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.states.iter().map(|s| s.chars.len() + s.ops.len()).sum()
    }

    /// Whether every accepting run marks exactly one span per variable.
    pub fn is_functional(&self) -> bool {
        self.functional
    }

    /// Keeps states reachable from the initial state and co-reachable to an
    /// accepting one; renumbers in breadth-first order.
    fn prune(&mut self) {
        let n = self.states.len();
        let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, state) in self.states.iter().enumerate() {
            for &(_, t) in &state.chars {
                reverse[t as usize].push(s as StateId);
            }
            for &(_, t) in &state.ops {
                reverse[t as usize].push(s as StateId);
            }
        }
        let mut live = vec![false; n];
        let mut stack: Vec<StateId> =
            (0..n).filter(|&s| self.states[s].accepting).map(|s| s as StateId).collect();
        for &s in &stack {
            live[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &reverse[s as usize] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let mut order = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        let mut kept = Vec::new();
        order[self.initial as usize] = 0;
        kept.push(self.initial);
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            let state = &self.states[s as usize];
            let targets = state.ops.iter().map(|&(_, t)| t).chain(state.chars.iter().map(|&(_, t)| t));
            for t in targets {
                if live[t as usize] && order[t as usize] == u32::MAX {
                    order[t as usize] = kept.len() as u32;
                    kept.push(t);
                    queue.push_back(t);
                }
            }
        }
        let old = std::mem::take(&mut self.states);
        self.states = kept
            .iter()
            .map(|&s| {
                let st = &old[s as usize];
                let mut chars: Vec<(CharSet, StateId)> = Vec::new();
                for &(set, t) in &st.chars {
                    if live[t as usize] && !set.is_empty() {
                        let t = order[t as usize];
                        match chars.iter_mut().find(|(_, u)| *u == t) {
                            Some(entry) => entry.0 = entry.0.union(set),
                            None => chars.push((set, t)),
                        }
                    }
                }
                let mut ops: Vec<(OpSet, StateId)> = st
                    .ops
                    .iter()
                    .filter(|&&(_, t)| live[t as usize])
                    .map(|&(o, t)| (o, order[t as usize]))
                    .collect();
                ops.sort_unstable();
                ops.dedup();
                chars.sort_unstable_by_key(|&(c, t)| (t, c));
                State { accepting: st.accepting, chars, ops }
            })
            .collect();
        self.initial = 0;
    }

    /// Graphviz rendering for inspection.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph vset {\n  rankdir=LR;\n  start [shape=point];\n");
        let _ = writeln!(out, "  start -> q{};", self.initial);
        for (s, state) in self.states.iter().enumerate() {
            let shape = if state.accepting { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{s} [shape={shape}];");
            for &(set, t) in &state.chars {
                let label = set.to_string().replace('\\', "\\\\").replace('"', "\\\"");
                let _ = writeln!(out, "  q{s} -> q{t} [label=\"{label}\"];");
            }
            for &(ops, t) in &state.ops {
                let _ = writeln!(out, "  q{s} -> q{t} [label=\"{}\", style=dashed];", self.show_ops(ops));
            }
        }
        out.push_str("}\n");
        out
    }

    fn show_ops(&self, ops: OpSet) -> String {
        let mut parts = Vec::new();
        for (i, v) in self.vars.iter().enumerate() {
            if ops.opens(i) {
                parts.push(format!("{v}⊢"));
            }
            if ops.closes(i) {
                parts.push(format!("⊣{v}"));
            }
        }
        parts.join(" ")
    }
}

/// Compiles a formula; shorthand for [`VSetAutomaton::compile`].
pub fn compile(r: &RegexCV, alphabet: Alphabet) -> Result<VSetAutomaton, AutomatonError> {
    VSetAutomaton::compile(r, alphabet)
}

/// Whether every accepting run opens and closes each variable exactly once.
pub fn is_functional(a: &VSetAutomaton) -> bool {
    a.is_functional()
}
