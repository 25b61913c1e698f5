use std::collections::{HashMap, HashSet};

use super::thompson::{Label, Thompson};
use super::{OpSet, State, StateId, VSetAutomaton};
use crate::charset::Alphabet;

const UNSET: u64 = 0;
const OPEN: u64 = 1;
const CLOSED: u64 = 2;

fn status(st: u64, var: usize) -> u64 {
    (st >> (2 * var)) & 3
}

fn set_status(st: u64, var: usize, value: u64) -> u64 {
    (st & !(3 << (2 * var))) | (value << (2 * var))
}

/// The operations that take status word `from` to `to`.
fn ops_between(from: u64, to: u64, nvars: usize) -> OpSet {
    let mut bits = 0;
    for v in 0..nvars {
        match (status(from, v), status(to, v)) {
            (UNSET, OPEN) => bits |= OpSet::open(v),
            (UNSET, CLOSED) => bits |= OpSet::open(v) | OpSet::close(v),
            (OPEN, CLOSED) => bits |= OpSet::close(v),
            _ => {}
        }
    }
    OpSet(bits)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Phase {
    /// Reached by a character edge (or initial); may take one op edge.
    Pre,
    /// Reached by an op edge; only character edges leave it.
    Post,
}

/// Operation closure of a Thompson automaton. States are (phase, Thompson
/// state, status word); invalid operation sequences are never generated.
pub(super) fn normalize(t: &Thompson, alphabet: Alphabet) -> VSetAutomaton {
    let nvars = t.vars.len();
    let all_closed = (0..nvars).fold(0u64, |acc, v| set_status(acc, v, CLOSED));
    let important = |q: u32| {
        q == t.accept || t.edges[q as usize].iter().any(|(l, _)| matches!(l, Label::Chars(_)))
    };

    let mut ids: HashMap<(Phase, u32, u64), StateId> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut work: Vec<(Phase, u32, u64)> = Vec::new();
    fn intern(
        key: (Phase, u32, u64),
        ids: &mut HashMap<(Phase, u32, u64), StateId>,
        states: &mut Vec<State>,
        work: &mut Vec<(Phase, u32, u64)>,
    ) -> StateId {
        *ids.entry(key).or_insert_with(|| {
            states.push(State::default());
            work.push(key);
            (states.len() - 1) as StateId
        })
    }

    let initial = intern((Phase::Pre, t.start, UNSET), &mut ids, &mut states, &mut work);
    while let Some(key) = work.pop() {
        let (phase, q, st) = key;
        let id = ids[&key] as usize;
        let reached: Vec<(u32, u64)> = match phase {
            Phase::Post => vec![(q, st)],
            Phase::Pre => closure(t, q, st),
        };
        for (q2, st2) in reached {
            if !important(q2) {
                continue;
            }
            if st2 == st {
                if q2 == t.accept && st == all_closed {
                    states[id].accepting = true;
                }
                for &(label, target) in &t.edges[q2 as usize] {
                    if let Label::Chars(set) = label {
                        let to = intern((Phase::Pre, target, st), &mut ids, &mut states, &mut work);
                        states[id].chars.push((set, to));
                    }
                }
            } else {
                let ops = ops_between(st, st2, nvars);
                let to = intern((Phase::Post, q2, st2), &mut ids, &mut states, &mut work);
                states[id].ops.push((ops, to));
            }
        }
    }
    VSetAutomaton::from_parts(alphabet, t.vars.clone(), states, initial, true)
}

/// All (state, status) pairs reachable through ε and operation edges.
fn closure(t: &Thompson, q: u32, st: u64) -> Vec<(u32, u64)> {
    let mut seen = HashSet::new();
    let mut stack = vec![(q, st)];
    seen.insert((q, st));
    let mut out = Vec::new();
    while let Some((p, s)) = stack.pop() {
        out.push((p, s));
        for &(label, target) in &t.edges[p as usize] {
            let next = match label {
                Label::Eps => Some(s),
                Label::Chars(_) => None,
                Label::Open(v) => (status(s, v) == UNSET).then(|| set_status(s, v, OPEN)),
                Label::Close(v) => (status(s, v) == OPEN).then(|| set_status(s, v, CLOSED)),
            };
            if let Some(ns) = next {
                if seen.insert((target, ns)) {
                    stack.push((target, ns));
                }
            }
        }
    }
    out
}
