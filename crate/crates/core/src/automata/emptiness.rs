use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{OpSet, Span, StateId, VSetAutomaton};

/// A document accepted by an automaton together with one accepting row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub document: String,
    pub columns: Vec<String>,
    pub row: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    NonEmpty(Witness),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Emptiness::Empty => None,
            Emptiness::NonEmpty(w) => Some(w),
        }
    }
}

#[derive(Clone, Copy)]
enum Parent {
    Start,
    Op(StateId, OpSet),
    Char(StateId),
}

/// Decides emptiness; on a nonempty automaton returns a shortest accepted
/// document, choosing the smallest character at each position.
pub fn emptiness(aut: &VSetAutomaton) -> Emptiness {
    let dist = distances_to_accept(aut);
    let total = dist[aut.initial as usize];
    if total == u32::MAX {
        return Emptiness::Empty;
    }

    let mut layers: Vec<BTreeMap<StateId, Parent>> = Vec::new();
    let mut layer = BTreeMap::new();
    layer.insert(aut.initial, Parent::Start);
    close_ops(aut, &dist, total, &mut layer);
    let mut text = Vec::new();
    for remaining in (1..=total).rev() {
        let mut best: Option<u8> = None;
        for &s in layer.keys() {
            for &(set, t) in &aut.states[s as usize].chars {
                if dist[t as usize] == remaining - 1 {
                    let c = set.first().expect("pruned edges are nonempty");
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
            }
        }
        let c = best.expect("a shortest path continues");
        let mut next = BTreeMap::new();
        for &s in layer.keys() {
            for &(set, t) in &aut.states[s as usize].chars {
                if dist[t as usize] == remaining - 1 && set.contains(c) {
                    next.entry(t).or_insert(Parent::Char(s));
                }
            }
        }
        close_ops(aut, &dist, remaining - 1, &mut next);
        text.push(c);
        layers.push(std::mem::replace(&mut layer, next));
    }
    layers.push(layer);

    let last = layers.last().unwrap();
    let mut state = *last
        .keys()
        .find(|&&s| aut.states[s as usize].accepting)
        .expect("distance zero implies an accepting state");
    let nvars = aut.vars.len();
    let mut marks = vec![0u32; 2 * nvars];
    let mut depth = layers.len() - 1;
    loop {
        match layers[depth][&state] {
            Parent::Start => break,
            Parent::Op(prev, ops) => {
                let offset = depth as u32 + 1;
                for v in 0..nvars {
                    if ops.opens(v) {
                        marks[2 * v] = offset;
                    }
                    if ops.closes(v) {
                        marks[2 * v + 1] = offset;
                    }
                }
                state = prev;
            }
            Parent::Char(prev) => {
                state = prev;
                depth -= 1;
            }
        }
    }
    Emptiness::NonEmpty(Witness {
        document: String::from_utf8(text).expect("alphabet is ASCII"),
        columns: aut.vars.clone(),
        row: marks.chunks(2).map(|m| Span::new(m[0], m[1])).collect(),
    })
}

/// Adds op-successors that stay on a shortest path.
fn close_ops(aut: &VSetAutomaton, dist: &[u32], remaining: u32, layer: &mut BTreeMap<StateId, Parent>) {
    let pre: Vec<StateId> = layer.keys().copied().collect();
    for s in pre {
        for &(ops, t) in &aut.states[s as usize].ops {
            if dist[t as usize] == remaining {
                layer.entry(t).or_insert(Parent::Op(s, ops));
            }
        }
    }
}

/// Minimum number of characters from each state to acceptance (0-1 BFS on
/// reversed edges; operation edges cost nothing).
fn distances_to_accept(aut: &VSetAutomaton) -> Vec<u32> {
    let n = aut.states.len();
    let mut reverse: Vec<Vec<(StateId, u32)>> = vec![Vec::new(); n];
    for (s, state) in aut.states.iter().enumerate() {
        for &(_, t) in &state.chars {
            reverse[t as usize].push((s as StateId, 1));
        }
        for &(_, t) in &state.ops {
            reverse[t as usize].push((s as StateId, 0));
        }
    }
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for (s, state) in aut.states.iter().enumerate() {
        if state.accepting {
            dist[s] = 0;
            queue.push_back(s as StateId);
        }
    }
    while let Some(s) = queue.pop_front() {
        let d = dist[s as usize];
        for &(p, w) in &reverse[s as usize] {
            if d + w < dist[p as usize] {
                dist[p as usize] = d + w;
                if w == 0 {
                    queue.push_front(p);
                } else {
                    queue.push_back(p);
                }
            }
        }
    }
    dist
}
