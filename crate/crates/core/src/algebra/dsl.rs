//! Reader for program files.
//!
//! Statements end in `;`; `#` starts a comment outside formulas.
//!
//! ```text
//! alphabet printable;            alphabet "abc\n";
//! include "primitives.prog";
//! def name = ⟦formula⟧;          (usable as @name in later formulas)
//! let E1 = ⟦formula⟧;            let E = E1 ∪ π{x}(E2);
//! update-vars {D};
//! fd E_valCon: {R} -> {D1, T1};
//! output E_date = E1 ∪ E2;       output E_date;
//! ```
//!
//! Operators, loosest first: `∪`/`union`, `⋈`/`join`, then the prefix forms
//! `π{x,y}(e)`/`project`, `ζ{x,y}(e)`/`select`, `ρ{a->b}(e)`/`rename`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use super::{
    infer_schema, make_leaf, FunctionalDependency, Location, NodeId, Op, ProgramError, ProgramNode,
    SpannerProgram,
};
use crate::charset::{Alphabet, CharSet};
use crate::regex_cv::{parse_with_macros, Macros, RegexCV};

#[derive(Clone, Debug)]
enum Expr {
    Ref(String, Location),
    Union(Box<Expr>, Box<Expr>),
    Join(Box<Expr>, Box<Expr>),
    Project(Vec<String>, Box<Expr>),
    Select(String, String, Box<Expr>),
    Rename(Vec<(String, String)>, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ref(name, _) => f.write_str(name),
            Expr::Union(a, b) => write!(f, "({a} ∪ {b})"),
            Expr::Join(a, b) => write!(f, "({a} ⋈ {b})"),
            Expr::Project(keep, e) => write!(f, "π{{{}}}({e})", keep.join(",")),
            Expr::Select(x, y, e) => write!(f, "ζ{{{x},{y}}}({e})"),
            Expr::Rename(map, e) => {
                let pairs: Vec<String> = map.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "ρ{{{}}}({e})", pairs.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Definition {
    Formula(RegexCV),
    Expr(Expr),
}

#[derive(Default)]
struct Declarations {
    alphabet: Option<(Alphabet, Location)>,
    macros: Macros,
    lets: BTreeMap<String, (Definition, Location)>,
    update_vars: Option<Vec<String>>,
    fds: Vec<(String, BTreeSet<String>, BTreeSet<String>, Location)>,
    output: Option<Expr>,
    included: HashSet<PathBuf>,
    sources: Vec<String>,
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    file: &'a str,
    base: Option<&'a Path>,
}

pub(super) fn parse_program(
    source: &str,
    file: &str,
    base: Option<&Path>,
    requested: Option<Alphabet>,
) -> Result<SpannerProgram, ProgramError> {
    let mut decls = Declarations { sources: vec![source.to_string()], ..Default::default() };
    let mut cursor = Cursor { chars: source.chars().collect(), pos: 0, file, base };
    cursor.statements(&mut decls)?;
    let (alphabet, declared) = match (&decls.alphabet, requested) {
        (Some((a, at)), Some(r)) if *a != r => {
            return Err(ProgramError::Syntax {
                at: at.clone(),
                message: "declared alphabet conflicts with the requested one".into(),
            })
        }
        (Some((a, _)), _) => (*a, true),
        (None, Some(r)) => (r, false),
        (None, None) => (Alphabet::printable(), false),
    };
    let output_expr = decls.output.clone().ok_or(ProgramError::MissingOutput)?;
    let mut b = Builder { decls: &decls, alphabet, nodes: Vec::new(), names: BTreeMap::new(), active: Vec::new() };
    let output = b.expr(&output_expr)?;
    let mut fds = Vec::new();
    for (name, det, dep, at) in &decls.fds {
        let node = match b.name(name, at) {
            Ok(id) => id,
            Err(ProgramError::UnknownName { .. }) => return Err(ProgramError::UnknownFdNode(name.clone())),
            Err(e) => return Err(e),
        };
        fds.push(FunctionalDependency { node, determinant: det.clone(), dependents: dep.clone() });
    }
    let Builder { nodes, names, .. } = b;
    let mut program = SpannerProgram::assemble(alphabet, declared, nodes, names, output, decls.update_vars.clone(), fds)?;
    program.sources = decls.sources;
    Ok(program)
}

struct Builder<'a> {
    decls: &'a Declarations,
    alphabet: Alphabet,
    nodes: Vec<ProgramNode>,
    names: BTreeMap<String, NodeId>,
    active: Vec<String>,
}

impl Builder<'_> {
    fn push(&mut self, op: Op, label: String) -> Result<NodeId, ProgramError> {
        let nodes = &self.nodes;
        let schema = infer_schema(&label, &op, &|id| nodes[id].schema.clone())?;
        self.nodes.push(ProgramNode { op, label, schema });
        Ok(self.nodes.len() - 1)
    }

    fn name(&mut self, name: &str, at: &Location) -> Result<NodeId, ProgramError> {
        if let Some(&id) = self.names.get(name) {
            return Ok(id);
        }
        if self.active.iter().any(|a| a == name) {
            return Err(ProgramError::Cycle(name.to_string()));
        }
        let Some((def, _)) = self.decls.lets.get(name) else {
            return Err(ProgramError::UnknownName { at: at.clone(), name: name.to_string() });
        };
        self.active.push(name.to_string());
        let id = match def {
            Definition::Formula(r) => {
                let leaf = make_leaf(name, r.clone(), self.alphabet)?;
                self.push(Op::Leaf(leaf), name.to_string())?
            }
            Definition::Expr(e) => {
                let fresh = self.nodes.len();
                let id = self.expr(e)?;
                if id >= fresh {
                    self.nodes[id].label = name.to_string();
                }
                id
            }
        };
        self.active.pop();
        self.names.insert(name.to_string(), id);
        Ok(id)
    }

    fn expr(&mut self, e: &Expr) -> Result<NodeId, ProgramError> {
        let label = e.to_string();
        match e {
            Expr::Ref(name, at) => self.name(name, at),
            Expr::Union(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.push(Op::Union(a, b), label)
            }
            Expr::Join(a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                self.push(Op::Join(a, b), label)
            }
            Expr::Project(keep, a) => {
                let a = self.expr(a)?;
                self.push(Op::Project(a, keep.clone()), label)
            }
            Expr::Select(x, y, a) => {
                let a = self.expr(a)?;
                self.push(Op::Select(a, x.clone(), y.clone()), label)
            }
            Expr::Rename(map, a) => {
                let a = self.expr(a)?;
                self.push(Op::Rename(a, map.clone()), label)
            }
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl Cursor<'_> {
    fn location(&self, pos: usize) -> Location {
        let before = &self.chars[..pos.min(self.chars.len())];
        let line = before.iter().filter(|&&c| c == '\n').count() + 1;
        let column = before.iter().rev().take_while(|&&c| c != '\n').count() + 1;
        Location { file: self.file.to_string(), line, column }
    }

    fn here(&self) -> Location {
        self.location(self.pos)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ProgramError> {
        Err(ProgramError::Syntax { at: self.here(), message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('#') => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    /// Consumes `token` (after whitespace) if present.
    fn eat(&mut self, token: &str) -> bool {
        self.skip();
        let t: Vec<char> = token.chars().collect();
        let end = self.pos + t.len();
        if end <= self.chars.len() && self.chars[self.pos..end] == t[..] {
            let word = t.last().is_some_and(|&c| is_name_char(c));
            if word && self.chars.get(end).is_some_and(|&c| is_name_char(c) || c == '-') {
                return false;
            }
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ProgramError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(format!("expected `{token}`"))
        }
    }

    fn name(&mut self) -> Result<String, ProgramError> {
        self.skip();
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return self.error("expected a name");
        }
        while self.peek().is_some_and(is_name_char) {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn keyword(&mut self) -> Result<String, ProgramError> {
        self.skip();
        let start = self.pos;
        while self.peek().is_some_and(|c| is_name_char(c) || c == '-') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a statement");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn string(&mut self) -> Result<String, ProgramError> {
        self.skip();
        if self.peek() != Some('"') {
            return self.error("expected a string");
        }
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return self.error("unterminated string"),
                Some('"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('s') => ' ',
                        Some(c @ ('\\' | '"')) => c,
                        _ => return self.error("unknown escape in string"),
                    };
                    out.push(c);
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn name_set(&mut self) -> Result<Vec<String>, ProgramError> {
        self.expect("{")?;
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.push(self.name()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn formula(&mut self, macros: &Macros) -> Result<RegexCV, ProgramError> {
        self.expect("⟦")?;
        let start = self.pos;
        while self.peek().is_some_and(|c| c != '⟧') {
            self.pos += 1;
        }
        if self.peek().is_none() {
            return Err(ProgramError::Syntax { at: self.location(start - 1), message: "unterminated `⟦`".into() });
        }
        let body: String = self.chars[start..self.pos].iter().collect();
        self.pos += 1;
        parse_with_macros(&body, macros)
            .map_err(|source| ProgramError::Formula { at: self.location(start + source.offset), source })
    }

    fn statements(&mut self, decls: &mut Declarations) -> Result<(), ProgramError> {
        loop {
            self.skip();
            if self.peek().is_none() {
                return Ok(());
            }
            let at = self.here();
            let keyword = self.keyword()?;
            match keyword.as_str() {
                "alphabet" => {
                    let alphabet = if self.eat("printable") {
                        Alphabet::printable()
                    } else {
                        let chars = self.string()?;
                        if let Some(c) = chars.chars().find(|c| !c.is_ascii()) {
                            return self.error(format!("alphabet character '{c}' is outside ASCII"));
                        }
                        Alphabet::new(CharSet::from_bytes(chars.as_bytes()))
                    };
                    if decls.alphabet.is_some() {
                        return Err(ProgramError::Syntax { at, message: "alphabet declared twice".into() });
                    }
                    decls.alphabet = Some((alphabet, at));
                }
                "include" => {
                    let path = self.string()?;
                    self.include(&path, at, decls)?;
                }
                "def" => {
                    let name = self.name()?;
                    self.expect("=")?;
                    let r = self.formula(&decls.macros)?;
                    if decls.macros.insert(name.clone(), r).is_some() {
                        return Err(ProgramError::Duplicate { at, name });
                    }
                }
                "let" => {
                    let name = self.name()?;
                    self.expect("=")?;
                    self.skip();
                    let def = if self.peek() == Some('⟦') {
                        Definition::Formula(self.formula(&decls.macros)?)
                    } else {
                        Definition::Expr(self.expr()?)
                    };
                    self.bind(decls, name, def, at)?;
                }
                "update-vars" => {
                    let vars = self.name_set()?;
                    decls.update_vars.get_or_insert_with(Vec::new).extend(vars);
                }
                "fd" => {
                    let node = self.name()?;
                    self.expect(":")?;
                    let det = self.name_set()?;
                    if !self.eat("->") && !self.eat("→") {
                        return self.error("expected `->`");
                    }
                    let dep = self.name_set()?;
                    decls.fds.push((node, det.into_iter().collect(), dep.into_iter().collect(), at));
                }
                "output" => {
                    if decls.output.is_some() {
                        return Err(ProgramError::Syntax { at, message: "output declared twice".into() });
                    }
                    let save = self.pos;
                    let named = self.name().ok().filter(|_| self.eat("="));
                    let expr = match named {
                        Some(name) => {
                            let e = self.expr()?;
                            self.bind(decls, name.clone(), Definition::Expr(e), at.clone())?;
                            Expr::Ref(name, at)
                        }
                        None => {
                            self.pos = save;
                            self.expr()?
                        }
                    };
                    decls.output = Some(expr);
                }
                other => return Err(ProgramError::Syntax { at, message: format!("unknown statement `{other}`") }),
            }
            self.expect(";")?;
        }
    }

    fn bind(&self, decls: &mut Declarations, name: String, def: Definition, at: Location) -> Result<(), ProgramError> {
        if decls.lets.contains_key(&name) {
            return Err(ProgramError::Duplicate { at, name });
        }
        decls.lets.insert(name, (def, at));
        Ok(())
    }

    fn include(&self, path: &str, at: Location, decls: &mut Declarations) -> Result<(), ProgramError> {
        let full = match self.base {
            Some(b) => b.join(path),
            None => PathBuf::from(path),
        };
        let fail = |message: String| ProgramError::Include { at: at.clone(), path: path.to_string(), message };
        let canonical = full.canonicalize().map_err(|e| fail(e.to_string()))?;
        if !decls.included.insert(canonical.clone()) {
            return Ok(());
        }
        let source = std::fs::read_to_string(&canonical).map_err(|e| fail(e.to_string()))?;
        decls.sources.push(source.clone());
        let file = full.display().to_string();
        let mut inner = Cursor { chars: source.chars().collect(), pos: 0, file: &file, base: canonical.parent() };
        inner.statements(decls)
    }

    fn expr(&mut self) -> Result<Expr, ProgramError> {
        let mut left = self.join()?;
        while self.eat("∪") || self.eat("union") {
            left = Expr::Union(Box::new(left), Box::new(self.join()?));
        }
        Ok(left)
    }

    fn join(&mut self) -> Result<Expr, ProgramError> {
        let mut left = self.unary()?;
        while self.eat("⋈") || self.eat("join") {
            left = Expr::Join(Box::new(left), Box::new(self.unary()?));
        }
        Ok(left)
    }

    fn operand(&mut self) -> Result<Box<Expr>, ProgramError> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(Box::new(e))
    }

    fn unary(&mut self) -> Result<Expr, ProgramError> {
        if self.eat("π") || self.eat("project") {
            let keep = self.name_set()?;
            return Ok(Expr::Project(keep, self.operand()?));
        }
        if self.eat("ζ") || self.eat("select") {
            let pair = self.name_set()?;
            if pair.len() != 2 {
                return self.error("selection takes exactly two variables");
            }
            return Ok(Expr::Select(pair[0].clone(), pair[1].clone(), self.operand()?));
        }
        if self.eat("ρ") || self.eat("rename") {
            self.expect("{")?;
            let mut map = Vec::new();
            loop {
                let from = self.name()?;
                if !self.eat("->") && !self.eat("→") {
                    return self.error("expected `->`");
                }
                map.push((from, self.name()?));
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
            return Ok(Expr::Rename(map, self.operand()?));
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let at = self.here();
        let name = self.name()?;
        Ok(Expr::Ref(name, at))
    }
}
