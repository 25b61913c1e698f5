//! Extraction programs: formula leaves combined by union, projection,
//! natural join, string-equality selection and renaming.
//!
//! Programs are read from a small text format (see [`SpannerProgram::parse`]):
//!
//! ```text
//! alphabet printable;
//! def digit = ⟦[0-9]⟧;
//! let E1 = ⟦Σ* ␣ D{@digit @digit} ␣ Σ*⟧;
//! let E2 = ⟦Σ* : D{@digit @digit} \n Σ*⟧;
//! update-vars {D};
//! output E_dates = E1 ∪ E2;
//! ```

mod dsl;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::automata::{match_all, AutomatonError, SpanRelation, VSetAutomaton};
use crate::charset::Alphabet;
use crate::regex_cv::{classify_variables, Exposure, RegexCV, SyntaxError};

pub type NodeId = usize;

/// A position in a program source file (1-based line and column).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProgramError {
    #[error("{at}: {message}")]
    Syntax { at: Location, message: String },
    #[error("{at}: {source}")]
    Formula { at: Location, source: SyntaxError },
    #[error("{at}: cannot include `{path}`: {message}")]
    Include { at: Location, path: String, message: String },
    #[error("{at}: unknown name `{name}`")]
    UnknownName { at: Location, name: String },
    #[error("{at}: `{name}` is defined twice")]
    Duplicate { at: Location, name: String },
    #[error("definition of `{0}` refers to itself")]
    Cycle(String),
    #[error("formula `{0}` is not functional")]
    NonFunctional(String),
    #[error("formula `{0}` has no exposed variable")]
    NoExposedVariable(String),
    #[error("union `{node}` joins different schemas {left:?} and {right:?}")]
    SchemaMismatch { node: String, left: Vec<String>, right: Vec<String> },
    #[error("`{node}` refers to unknown variable `{var}`")]
    UnknownVariable { node: String, var: String },
    #[error("rename `{node}` produces variable `{var}` twice")]
    RenameCollision { node: String, var: String },
    #[error("program has no output")]
    MissingOutput,
    #[error("update variable `{0}` is not in the output schema")]
    UnknownUpdateVariable(String),
    #[error("functional dependency names unknown node `{0}`")]
    UnknownFdNode(String),
    #[error("formula `{name}`: {source}")]
    Automaton { name: String, source: AutomatonError },
}

/// An extraction formula at a leaf of the program.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub name: String,
    pub formula: RegexCV,
    pub automaton: VSetAutomaton,
}

impl Leaf {
    /// Compiles `formula`, which must be functional and have an exposed variable.
    pub fn new(name: &str, formula: RegexCV, alphabet: Alphabet) -> Result<Leaf, ProgramError> {
        make_leaf(name, formula, alphabet)
    }
}

#[derive(Clone, Debug)]
pub enum Op {
    Leaf(Leaf),
    Union(NodeId, NodeId),
    Join(NodeId, NodeId),
    Project(NodeId, Vec<String>),
    /// Keeps rows whose two spans cover equal strings.
    Select(NodeId, String, String),
    Rename(NodeId, Vec<(String, String)>),
}

#[derive(Clone, Debug)]
pub struct ProgramNode {
    pub op: Op,
    /// The `let` name bound to this node, or a generated label.
    pub label: String,
    pub schema: Vec<String>,
}

impl ProgramNode {
    pub fn operands(&self) -> Vec<NodeId> {
        match &self.op {
            Op::Leaf(_) => Vec::new(),
            Op::Union(a, b) | Op::Join(a, b) => vec![*a, *b],
            Op::Project(a, _) | Op::Select(a, ..) | Op::Rename(a, _) => vec![*a],
        }
    }
}

/// `determinant → dependents`, asserted for the relation of one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalDependency {
    pub node: NodeId,
    pub determinant: BTreeSet<String>,
    pub dependents: BTreeSet<String>,
}

/// A leaf formula in which an output variable originates, under its local name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Provenance {
    pub formula: String,
    pub variable: String,
}

#[derive(Clone, Debug)]
pub struct SpannerProgram {
    alphabet: Alphabet,
    declared_alphabet: bool,
    nodes: Vec<ProgramNode>,
    names: BTreeMap<String, NodeId>,
    output: NodeId,
    update_vars: Option<Vec<String>>,
    fds: Vec<FunctionalDependency>,
    sources: Vec<String>,
}

impl SpannerProgram {
    /// Parses program text. Relative `include` paths resolve against `base`
    /// (the current directory when `None`).
    pub fn parse(source: &str, file: &str, base: Option<&Path>) -> Result<Self, ProgramError> {
        dsl::parse_program(source, file, base, None)
    }

    /// Like [`SpannerProgram::parse`] with an alphabet to use when the
    /// program does not declare one.
    pub fn parse_with_alphabet(
        source: &str,
        file: &str,
        base: Option<&Path>,
        alphabet: Alphabet,
    ) -> Result<Self, ProgramError> {
        dsl::parse_program(source, file, base, Some(alphabet))
    }

    pub fn from_file(path: &Path) -> Result<Self, ProgramError> {
        Self::from_file_with(path, None)
    }

    pub fn from_file_with(path: &Path, alphabet: Option<Alphabet>) -> Result<Self, ProgramError> {
        let file = path.display().to_string();
        let source = std::fs::read_to_string(path).map_err(|e| ProgramError::Include {
            at: Location { file: file.clone(), line: 0, column: 0 },
            path: file.clone(),
            message: e.to_string(),
        })?;
        dsl::parse_program(&source, &file, path.parent(), alphabet)
    }

    pub(crate) fn assemble(
        alphabet: Alphabet,
        declared_alphabet: bool,
        nodes: Vec<ProgramNode>,
        names: BTreeMap<String, NodeId>,
        output: NodeId,
        update_vars: Option<Vec<String>>,
        fds: Vec<FunctionalDependency>,
    ) -> Result<Self, ProgramError> {
        let program =
            SpannerProgram { alphabet, declared_alphabet, nodes, names, output, update_vars, fds, sources: Vec::new() };
        if let Some(vars) = &program.update_vars {
            for v in vars {
                if !program.output_schema().contains(v) {
                    return Err(ProgramError::UnknownUpdateVariable(v.clone()));
                }
            }
        }
        for fd in &program.fds {
            let schema = &program.nodes[fd.node].schema;
            for v in fd.determinant.iter().chain(&fd.dependents) {
                if !schema.contains(v) {
                    return Err(ProgramError::UnknownVariable {
                        node: program.nodes[fd.node].label.clone(),
                        var: v.clone(),
                    });
                }
            }
        }
        Ok(program)
    }

    /// Text of the program and of each included file, in load order.
    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Whether the program text fixed the alphabet itself.
    pub fn declares_alphabet(&self) -> bool {
        self.declared_alphabet
    }

    pub fn nodes(&self) -> &[ProgramNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &ProgramNode {
        &self.nodes[id]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.get(name).copied()
    }

    pub fn output(&self) -> NodeId {
        self.output
    }

    pub fn output_schema(&self) -> &[String] {
        &self.nodes[self.output].schema
    }

    pub fn functional_dependencies(&self) -> &[FunctionalDependency] {
        &self.fds
    }

    /// Leaves reachable from the output, in node order.
    pub fn leaves(&self) -> Vec<&Leaf> {
        let reachable = self.reachable();
        self.nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| reachable.contains(i))
            .filter_map(|(_, n)| match &n.op {
                Op::Leaf(l) => Some(l),
                _ => None,
            })
            .collect()
    }

    pub fn leaf(&self, name: &str) -> Option<&Leaf> {
        self.nodes.iter().find_map(|n| match &n.op {
            Op::Leaf(l) if l.name == name => Some(l),
            _ => None,
        })
    }

    /// Nodes reachable from the output.
    pub fn reachable(&self) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.output];
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(self.nodes[n].operands());
            }
        }
        seen
    }

    /// Leaves in which output variable `v` is captured and survives every
    /// projection on the way to the output, with the variable's name there.
    pub fn prov(&self, v: &str) -> Result<Vec<Provenance>, ProgramError> {
        if !self.output_schema().iter().any(|c| c == v) {
            return Err(ProgramError::UnknownVariable {
                node: self.nodes[self.output].label.clone(),
                var: v.to_string(),
            });
        }
        let mut out = BTreeSet::new();
        let mut stack = vec![(self.output, v.to_string())];
        let mut seen = BTreeSet::new();
        while let Some((n, var)) = stack.pop() {
            if !seen.insert((n, var.clone())) {
                continue;
            }
            let node = &self.nodes[n];
            match &node.op {
                Op::Leaf(l) => {
                    if l.formula.svars().contains(&var) {
                        out.insert((n, Provenance { formula: l.name.clone(), variable: var }));
                    }
                }
                Op::Union(a, b) | Op::Join(a, b) => {
                    for c in [a, b] {
                        if self.nodes[*c].schema.contains(&var) {
                            stack.push((*c, var.clone()));
                        }
                    }
                }
                Op::Project(a, keep) => {
                    if keep.contains(&var) {
                        stack.push((*a, var));
                    }
                }
                Op::Select(a, ..) => stack.push((*a, var)),
                Op::Rename(a, map) => {
                    let source = match map.iter().find(|(_, to)| *to == var) {
                        Some((from, _)) => Some(from.clone()),
                        None if map.iter().any(|(from, _)| *from == var) => None,
                        None => Some(var),
                    };
                    if let Some(s) = source {
                        stack.push((*a, s));
                    }
                }
            }
        }
        Ok(out.into_iter().map(|(_, p)| p).collect())
    }

    /// The declared update variables, or else every output variable with
    /// nonempty provenance.
    pub fn updatable_variables(&self) -> Vec<String> {
        match &self.update_vars {
            Some(vars) => vars.clone(),
            None => self
                .output_schema()
                .iter()
                .filter(|v| self.prov(v).map(|p| !p.is_empty()).unwrap_or(false))
                .cloned()
                .collect(),
        }
    }

    /// Relational evaluation of the output over one document.
    pub fn evaluate(&self, text: &str) -> SpanRelation {
        self.evaluate_node(self.output, text)
    }

    pub fn evaluate_node(&self, id: NodeId, text: &str) -> SpanRelation {
        let mut memo: Vec<Option<SpanRelation>> = vec![None; self.nodes.len()];
        self.eval(id, text, &mut memo)
    }

    fn eval(&self, id: NodeId, text: &str, memo: &mut Vec<Option<SpanRelation>>) -> SpanRelation {
        if let Some(r) = &memo[id] {
            return r.clone();
        }
        let node = &self.nodes[id];
        let rel = match &node.op {
            Op::Leaf(l) => match_all(&l.automaton, text)
                .expect("leaf automata are checked functional at build time")
                .reorder(&node.schema),
            Op::Union(a, b) => {
                let left = self.eval(*a, text, memo);
                left.union(&self.eval(*b, text, memo))
            }
            Op::Join(a, b) => {
                let left = self.eval(*a, text, memo);
                left.join(&self.eval(*b, text, memo))
            }
            Op::Project(a, keep) => self.eval(*a, text, memo).project(keep),
            Op::Select(a, x, y) => {
                let mut rel = self.eval(*a, text, memo);
                let (i, j) = (rel.column(x).unwrap(), rel.column(y).unwrap());
                rel.retain(|row| row[i].text(text) == row[j].text(text));
                rel
            }
            Op::Rename(a, map) => {
                let rel = self.eval(*a, text, memo);
                rel.rename(&|c: &str| {
                    map.iter().find(|(from, _)| from == c).map_or_else(|| c.to_string(), |(_, to)| to.clone())
                })
            }
        };
        memo[id] = Some(rel.clone());
        rel
    }
}

/// Builds a leaf after checking it is functional and has an exposed variable.
pub(crate) fn make_leaf(name: &str, formula: RegexCV, alphabet: Alphabet) -> Result<Leaf, ProgramError> {
    let automaton = VSetAutomaton::compile(&formula, alphabet)
        .map_err(|source| ProgramError::Automaton { name: name.to_string(), source })?;
    if !automaton.is_functional() {
        return Err(ProgramError::NonFunctional(name.to_string()));
    }
    if !classify_variables(&formula).values().any(|i| i.exposure == Exposure::Exposed) {
        return Err(ProgramError::NoExposedVariable(name.to_string()));
    }
    Ok(Leaf { name: name.to_string(), formula, automaton })
}

/// Output schema of an operator over operand schemas.
pub(crate) fn infer_schema(label: &str, op: &Op, schema: &dyn Fn(NodeId) -> Vec<String>) -> Result<Vec<String>, ProgramError> {
    let unknown = |var: &str| ProgramError::UnknownVariable { node: label.to_string(), var: var.to_string() };
    match op {
        Op::Leaf(l) => Ok(l.formula.svars()),
        Op::Union(a, b) => {
            let (left, right) = (schema(*a), schema(*b));
            let (sl, sr): (BTreeSet<_>, BTreeSet<_>) = (left.iter().collect(), right.iter().collect());
            if sl != sr {
                return Err(ProgramError::SchemaMismatch { node: label.to_string(), left, right });
            }
            Ok(left)
        }
        Op::Join(a, b) => {
            let mut out = schema(*a);
            for v in schema(*b) {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            Ok(out)
        }
        Op::Project(a, keep) => {
            let inner = schema(*a);
            for k in keep {
                if !inner.contains(k) {
                    return Err(unknown(k));
                }
            }
            Ok(keep.clone())
        }
        Op::Select(a, x, y) => {
            let inner = schema(*a);
            for v in [x, y] {
                if !inner.contains(v) {
                    return Err(unknown(v));
                }
            }
            Ok(inner)
        }
        Op::Rename(a, map) => {
            let inner = schema(*a);
            for (from, _) in map {
                if !inner.contains(from) {
                    return Err(unknown(from));
                }
            }
            let out: Vec<String> = inner
                .iter()
                .map(|c| map.iter().find(|(f, _)| f == c).map_or_else(|| c.clone(), |(_, t)| t.clone()))
                .collect();
            for (i, v) in out.iter().enumerate() {
                if out[..i].contains(v) {
                    return Err(ProgramError::RenameCollision { node: label.to_string(), var: v.clone() });
                }
            }
            Ok(out)
        }
    }
}
