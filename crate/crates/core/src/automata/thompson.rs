use std::collections::HashSet;

use super::{AutomatonError, MAX_VARS};
use crate::charset::{Alphabet, CharSet};
use crate::regex_cv::{unigram_class, Node, RegexCV};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Label {
    Eps,
    Chars(CharSet),
    Open(usize),
    Close(usize),
}

/// ε-NFA with variable operations, one fragment per formula node.
pub(super) struct Thompson {
    pub edges: Vec<Vec<(Label, u32)>>,
    pub start: u32,
    pub accept: u32,
    pub vars: Vec<String>,
}

impl Thompson {
    pub fn build(r: &RegexCV, alphabet: Alphabet) -> Result<Self, AutomatonError> {
        let vars = r.svars();
        if vars.len() > MAX_VARS {
            return Err(AutomatonError::TooManyVariables(vars.len()));
        }
        let mut t = Thompson { edges: Vec::new(), start: 0, accept: 0, vars };
        let (s, e) = t.fragment(r.root(), alphabet);
        t.start = s;
        t.accept = e;
        Ok(t)
    }

    fn state(&mut self) -> u32 {
        self.edges.push(Vec::new());
        (self.edges.len() - 1) as u32
    }

    fn edge(&mut self, from: u32, label: Label, to: u32) {
        self.edges[from as usize].push((label, to));
    }

    fn fragment(&mut self, node: &Node, alphabet: Alphabet) -> (u32, u32) {
        let s = self.state();
        match node {
            Node::Empty => {
                let e = self.state();
                (s, e)
            }
            Node::Epsilon => (s, s),
            Node::Char(_) | Node::Range(..) | Node::Any | Node::Minus(..) => {
                let e = self.state();
                let set = unigram_class(node, alphabet);
                if !set.is_empty() {
                    self.edge(s, Label::Chars(set), e);
                }
                (s, e)
            }
            Node::Concat(children) => {
                let mut end = s;
                for child in children {
                    let (cs, ce) = self.fragment(child, alphabet);
                    self.edge(end, Label::Eps, cs);
                    end = ce;
                }
                (s, end)
            }
            Node::Alt(children) => {
                let e = self.state();
                for child in children {
                    let (cs, ce) = self.fragment(child, alphabet);
                    self.edge(s, Label::Eps, cs);
                    self.edge(ce, Label::Eps, e);
                }
                (s, e)
            }
            Node::Star(body) => {
                let e = self.state();
                let (bs, be) = self.fragment(body, alphabet);
                self.edge(s, Label::Eps, bs);
                self.edge(be, Label::Eps, bs);
                self.edge(be, Label::Eps, e);
                self.edge(s, Label::Eps, e);
                (s, e)
            }
            Node::Capture(name, body) => {
                let var = self.vars.iter().position(|v| v == name).expect("variable collected");
                let (bs, be) = self.fragment(body, alphabet);
                let e = self.state();
                self.edge(s, Label::Open(var), bs);
                self.edge(be, Label::Close(var), e);
                (s, e)
            }
        }
    }

    /// Decides functionality by exploring (state, per-variable status)
    /// pairs; statuses saturate at `BAD` once a run misuses a variable.
    pub fn is_functional(&self) -> bool {
        const UNSET: u8 = 0;
        const OPEN: u8 = 1;
        const CLOSED: u8 = 2;
        const BAD: u8 = 3;
        let k = self.vars.len();
        let start = (self.start, vec![UNSET; k]);
        let mut seen: HashSet<(u32, Vec<u8>)> = HashSet::new();
        let mut stack = vec![start.clone()];
        seen.insert(start);
        while let Some((q, status)) = stack.pop() {
            if q == self.accept && status.iter().any(|&s| s != CLOSED) {
                return false;
            }
            for &(label, t) in &self.edges[q as usize] {
                let mut next = status.clone();
                match label {
                    Label::Eps | Label::Chars(_) => {}
                    Label::Open(v) => next[v] = if next[v] == UNSET { OPEN } else { BAD },
                    Label::Close(v) => next[v] = if next[v] == OPEN { CLOSED } else { BAD },
                }
                let key = (t, next);
                if !seen.contains(&key) {
                    seen.insert(key.clone());
                    stack.push(key);
                }
            }
        }
        true
    }
}
