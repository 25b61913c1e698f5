//! Reference matcher: enumerates all parses of a formula over a document
//! and collects the span assignment of each. Shares nothing with the
//! automata code except the formula tree and the span type.

use std::collections::{BTreeSet, HashSet};

use spanclean::automata::Span;
use spanclean::regex_cv::{Node, RegexCV};
use spanclean::Alphabet;

/// Positions are counted as characters remaining to the end of the
/// document, so results for a suffix stay valid when a character is
/// prepended.
type Asg = Vec<(u8, u8, u8)>;
type Res = Vec<(u8, Asg)>;

enum ONode {
    Class([bool; 128]),
    Empty,
    Eps,
    Alt(Vec<usize>),
    Concat(Vec<usize>),
    Star(usize),
    Capture(u8, usize),
}

pub struct Oracle {
    nodes: Vec<ONode>,
    vars: Vec<String>,
}

fn class_of(node: &Node, sigma: &[u8]) -> [bool; 128] {
    let mut out = [false; 128];
    match node {
        Node::Char(c) => out[*c as usize] = sigma.contains(c),
        Node::Range(lo, hi) => {
            for c in *lo..=*hi {
                out[c as usize] = sigma.contains(&c);
            }
        }
        Node::Any => {
            for &c in sigma {
                out[c as usize] = true;
            }
        }
        Node::Minus(base, c) => {
            out = class_of(base, sigma);
            out[*c as usize] = false;
        }
        _ => unreachable!(),
    }
    out
}

impl Oracle {
    pub fn new(r: &RegexCV, alphabet: Alphabet) -> Self {
        let sigma: Vec<u8> = (0u8..128).filter(|&c| alphabet.contains(c)).collect();
        let mut o = Oracle { nodes: Vec::new(), vars: Vec::new() };
        o.add(r.root(), &sigma);
        o
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Post-order: children get smaller indices; the root is last.
    fn add(&mut self, node: &Node, sigma: &[u8]) -> usize {
        let n = match node {
            Node::Empty => ONode::Empty,
            Node::Epsilon => ONode::Eps,
            Node::Char(_) | Node::Range(..) | Node::Any | Node::Minus(..) => {
                ONode::Class(class_of(node, sigma))
            }
            Node::Alt(cs) => ONode::Alt(cs.iter().map(|c| self.add(c, sigma)).collect()),
            Node::Concat(cs) => ONode::Concat(cs.iter().map(|c| self.add(c, sigma)).collect()),
            Node::Star(b) => ONode::Star(self.add(b, sigma)),
            Node::Capture(name, b) => {
                let v = match self.vars.iter().position(|x| x == name) {
                    Some(i) => i,
                    None => {
                        self.vars.push(name.clone());
                        self.vars.len() - 1
                    }
                };
                let body = self.add(b, sigma);
                ONode::Capture(v as u8, body)
            }
        };
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    /// Results of every node at the position with `d` characters left,
    /// given the layers for all smaller `d`; `c` is the character there.
    fn layer(&self, lower: &[Vec<Res>], d: u8, c: Option<u8>) -> Vec<Res> {
        let mut cur: Vec<Res> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let get = |cur: &Vec<Res>, i: usize, p: u8| -> Res {
                if p == d {
                    cur[i].clone()
                } else {
                    lower[p as usize][i].clone()
                }
            };
            let mut res: Res = match node {
                ONode::Empty => Vec::new(),
                ONode::Eps => vec![(d, Vec::new())],
                ONode::Class(set) => match c {
                    Some(c) if set[c as usize] => vec![(d - 1, Vec::new())],
                    _ => Vec::new(),
                },
                ONode::Alt(cs) => cs.iter().flat_map(|&i| cur[i].clone()).collect(),
                ONode::Concat(cs) => {
                    let mut frontier: Res = vec![(d, Vec::new())];
                    for &i in cs {
                        let mut next = Vec::new();
                        for (p, a) in &frontier {
                            for (q, b) in get(&cur, i, *p) {
                                if let Some(m) = merge(a, &b) {
                                    next.push((q, m));
                                }
                            }
                        }
                        next.sort();
                        next.dedup();
                        frontier = next;
                    }
                    frontier
                }
                ONode::Star(b) => {
                    let mut seen: HashSet<(u8, Asg)> = HashSet::new();
                    let mut stack = vec![(d, Vec::new())];
                    seen.insert((d, Vec::new()));
                    while let Some((p, a)) = stack.pop() {
                        for (q, x) in get(&cur, *b, p) {
                            if let Some(m) = merge(&a, &x) {
                                if seen.insert((q, m.clone())) {
                                    stack.push((q, m));
                                }
                            }
                        }
                    }
                    seen.into_iter().collect()
                }
                ONode::Capture(v, b) => cur[*b]
                    .iter()
                    .filter_map(|(q, a)| merge(a, &[(*v, d, *q)]).map(|m| (*q, m)))
                    .collect(),
            };
            res.sort();
            res.dedup();
            cur.push(res);
        }
        cur
    }

    fn rows(&self, top: &Res, n: u8) -> BTreeSet<Vec<Span>> {
        let k = self.vars.len();
        top.iter()
            .filter(|(end, a)| *end == 0 && a.len() == k)
            .map(|(_, a)| {
                a.iter()
                    .map(|&(_, s, e)| Span::new((n - s + 1) as u32, (n - e + 1) as u32))
                    .collect()
            })
            .collect()
    }

    /// Rows (in [`Oracle::vars`] order) of all parses of `text`.
    pub fn match_text(&self, text: &str) -> BTreeSet<Vec<Span>> {
        let bytes = text.as_bytes();
        let n = bytes.len() as u8;
        let mut layers = vec![self.layer(&[], 0, None)];
        for d in 1..=n {
            let l = self.layer(&layers, d, Some(bytes[(n - d) as usize]));
            layers.push(l);
        }
        self.rows(layers.last().unwrap().last().unwrap(), n)
    }

    /// Calls `f` on every document over `sigma` of length at most `max_len`,
    /// sharing work between documents with a common suffix.
    pub fn for_each_doc(&self, sigma: &[u8], max_len: u8, f: &mut dyn FnMut(&[u8], BTreeSet<Vec<Span>>)) {
        let mut layers = vec![self.layer(&[], 0, None)];
        let mut rev = Vec::new();
        self.walk(sigma, max_len, &mut layers, &mut rev, f);
    }

    fn walk(
        &self,
        sigma: &[u8],
        max_len: u8,
        layers: &mut Vec<Vec<Res>>,
        rev: &mut Vec<u8>,
        f: &mut dyn FnMut(&[u8], BTreeSet<Vec<Span>>),
    ) {
        let n = rev.len() as u8;
        let doc: Vec<u8> = rev.iter().rev().copied().collect();
        f(&doc, self.rows(layers.last().unwrap().last().unwrap(), n));
        if n == max_len {
            return;
        }
        for &c in sigma {
            let l = self.layer(layers, n + 1, Some(c));
            layers.push(l);
            rev.push(c);
            self.walk(sigma, max_len, layers, rev, f);
            rev.pop();
            layers.pop();
        }
    }
}

/// Union of two assignments; `None` if a variable would be bound twice.
fn merge(a: &[(u8, u8, u8)], b: &[(u8, u8, u8)]) -> Option<Asg> {
    if b.is_empty() {
        return Some(a.to_vec());
    }
    let mut out = a.to_vec();
    for x in b {
        if out.iter().any(|y| y.0 == x.0) {
            return None;
        }
        out.push(*x);
    }
    out.sort();
    Some(out)
}
