use std::collections::{HashMap, VecDeque};

use super::{AutomatonError, StateId, VSetAutomaton};
use crate::charset::{Alphabet, CharSet};
use crate::regex_cv::RegexCV;

/// The plain regular language of a formula (captures erased).
#[derive(Clone, Debug)]
pub struct Nfa {
    aut: VSetAutomaton,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Included,
    /// A shortest word in the left language but not the right one.
    Counterexample(String),
}

impl Nfa {
    pub fn new(r: &RegexCV, alphabet: Alphabet) -> Result<Self, AutomatonError> {
        Ok(Nfa { aut: VSetAutomaton::compile(&r.erase_captures(), alphabet)? })
    }

    pub fn accepts(&self, text: &str) -> bool {
        let mut current = vec![self.aut.initial];
        for b in text.bytes() {
            let mut next: Vec<StateId> = current
                .iter()
                .flat_map(|&s| self.aut.states[s as usize].chars.iter())
                .filter(|(set, _)| set.contains(b))
                .map(|&(_, t)| t)
                .collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|&s| self.aut.states[s as usize].accepting)
    }

    /// Characters occurring in some accepted word.
    pub fn char_set(&self) -> CharSet {
        self.aut
            .states
            .iter()
            .flat_map(|s| s.chars.iter())
            .fold(CharSet::EMPTY, |acc, &(set, _)| acc.union(set))
    }

    pub fn is_empty(&self) -> bool {
        !self.aut.states[self.aut.initial as usize].accepting
            && self.aut.states[self.aut.initial as usize].chars.is_empty()
    }

    /// Decides L(self) ⊆ L(other) by exploring self × subsets of other.
    pub fn included_in(&self, other: &Nfa) -> Inclusion {
        let classes = minterms(self.aut.alphabet.chars(), [&self.aut, &other.aut]);
        let start = (self.aut.initial, vec![other.aut.initial]);
        let mut parent: HashMap<(StateId, Vec<StateId>), Option<((StateId, Vec<StateId>), u8)>> =
            HashMap::new();
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            let (s, ref set) = node;
            let accepted_left = self.aut.states[s as usize].accepting;
            let accepted_right = set.iter().any(|&t| other.aut.states[t as usize].accepting);
            if accepted_left && !accepted_right {
                let mut word = Vec::new();
                let mut cursor = node.clone();
                while let Some(Some((prev, c))) = parent.get(&cursor) {
                    word.push(*c);
                    cursor = prev.clone();
                }
                word.reverse();
                return Inclusion::Counterexample(String::from_utf8(word).expect("ASCII"));
            }
            for &c in &classes {
                let mut right: Vec<StateId> = set
                    .iter()
                    .flat_map(|&t| other.aut.states[t as usize].chars.iter())
                    .filter(|(cs, _)| cs.contains(c))
                    .map(|&(_, t)| t)
                    .collect();
                right.sort_unstable();
                right.dedup();
                for &(cs, t) in &self.aut.states[s as usize].chars {
                    if cs.contains(c) {
                        let next = (t, right.clone());
                        if !parent.contains_key(&next) {
                            parent.insert(next.clone(), Some((node.clone(), c)));
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        Inclusion::Included
    }
}

/// One representative character per block of the coarsest partition of
/// the alphabet that respects every edge label of the automata.
fn minterms<'a>(sigma: CharSet, auts: impl IntoIterator<Item = &'a VSetAutomaton>) -> Vec<u8> {
    let mut blocks = vec![sigma];
    for aut in auts {
        for state in &aut.states {
            for &(set, _) in &state.chars {
                blocks = blocks
                    .into_iter()
                    .flat_map(|b| [b.intersect(set), b.minus(set)])
                    .filter(|b| !b.is_empty())
                    .collect();
            }
        }
    }
    blocks.iter().filter_map(|b| b.first()).collect()
}
