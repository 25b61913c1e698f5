//! Interval relations between two spans and their two-variable spanners.
//!
//! For `x = [a,b⟩` and `y = [c,d⟩` the basic relations are
//!
//! | relation    | condition                    |
//! |-------------|------------------------------|
//! | precedes    | `b < c`                      |
//! | meets       | `b = c`, `a < b`, `c < d`    |
//! | overlaps    | `a < c < b < d`              |
//! | during      | `c < a`, `b < d`             |
//! | starts      | `a = c`, `b < d`             |
//! | finishes    | `b = d`, `c < a`             |
//! | equals      | `a = c`, `b = d`             |
//!
//! plus the six inverses obtained by swapping `x` and `y`. Empty spans take
//! part like any other: an empty span at the start of a nonempty one
//! *starts* it, one at its end *finishes* it. With these rules every pair of
//! spans satisfies exactly one basic relation.

use std::fmt;

use crate::automata::{OpSet, Span, State, StateId, VSetAutomaton};
use crate::charset::Alphabet;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum BasicRelation {
    Precedes,
    PrecededBy,
    Meets,
    MetBy,
    Overlaps,
    OverlappedBy,
    During,
    Contains,
    Starts,
    StartedBy,
    Finishes,
    FinishedBy,
    Equals,
}

impl BasicRelation {
    /// In table order.
    pub const ALL: [BasicRelation; 13] = [
        BasicRelation::Precedes,
        BasicRelation::PrecededBy,
        BasicRelation::Meets,
        BasicRelation::MetBy,
        BasicRelation::Overlaps,
        BasicRelation::OverlappedBy,
        BasicRelation::During,
        BasicRelation::Contains,
        BasicRelation::Starts,
        BasicRelation::StartedBy,
        BasicRelation::Finishes,
        BasicRelation::FinishedBy,
        BasicRelation::Equals,
    ];

    pub fn inverse(self) -> BasicRelation {
        use BasicRelation::*;
        match self {
            Precedes => PrecededBy,
            PrecededBy => Precedes,
            Meets => MetBy,
            MetBy => Meets,
            Overlaps => OverlappedBy,
            OverlappedBy => Overlaps,
            During => Contains,
            Contains => During,
            Starts => StartedBy,
            StartedBy => Starts,
            Finishes => FinishedBy,
            FinishedBy => Finishes,
            Equals => Equals,
        }
    }

    /// Whether the relation holds, given the endpoints as comparable keys.
    fn holds_on<T: Ord + Copy>(self, a: T, b: T, c: T, d: T) -> bool {
        use BasicRelation::*;
        match self {
            Precedes => b < c,
            Meets => b == c && a < b && c < d,
            Overlaps => a < c && c < b && b < d,
            During => c < a && b < d,
            Starts => a == c && b < d,
            Finishes => b == d && c < a,
            Equals => a == c && b == d,
            inverse => inverse.inverse().holds_on(c, d, a, b),
        }
    }

    pub fn holds(self, x: Span, y: Span) -> bool {
        self.holds_on(x.start, x.end, y.start, y.end)
    }

    /// The unique basic relation between two spans.
    pub fn classify(x: Span, y: Span) -> BasicRelation {
        *Self::ALL.iter().find(|r| r.holds(x, y)).expect("the basic relations are exhaustive")
    }

    pub fn name(self) -> &'static str {
        use BasicRelation::*;
        match self {
            Precedes => "precedes",
            PrecededBy => "preceded-by",
            Meets => "meets",
            MetBy => "met-by",
            Overlaps => "overlaps",
            OverlappedBy => "overlapped-by",
            During => "during",
            Contains => "contains",
            Starts => "starts",
            StartedBy => "started-by",
            Finishes => "finishes",
            FinishedBy => "finished-by",
            Equals => "equals",
        }
    }
}

/// A basic relation or one of the named disjunctions used by the verifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AllenRelation {
    Basic(BasicRelation),
    /// The spans share a position: rows 5 to 13 of the table.
    Overlap,
    /// Overlap without equality: rows 5 to 12.
    OverlapNotEqual,
    /// Anything but equality: rows 1 to 12.
    NotEqual,
}

impl AllenRelation {
    pub fn basics(self) -> &'static [BasicRelation] {
        match self {
            AllenRelation::Basic(r) => {
                let i = BasicRelation::ALL.iter().position(|b| *b == r).unwrap();
                &BasicRelation::ALL[i..=i]
            }
            AllenRelation::Overlap => &BasicRelation::ALL[4..13],
            AllenRelation::OverlapNotEqual => &BasicRelation::ALL[4..12],
            AllenRelation::NotEqual => &BasicRelation::ALL[0..12],
        }
    }

    pub fn holds(self, x: Span, y: Span) -> bool {
        self.basics().contains(&BasicRelation::classify(x, y))
    }
}

impl From<BasicRelation> for AllenRelation {
    fn from(r: BasicRelation) -> Self {
        AllenRelation::Basic(r)
    }
}

impl fmt::Display for AllenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AllenRelation::Basic(r) => f.write_str(r.name()),
            AllenRelation::Overlap => f.write_str("overlap"),
            AllenRelation::OverlapNotEqual => f.write_str("overlap-not-equal"),
            AllenRelation::NotEqual => f.write_str("not-equal"),
        }
    }
}

const X: usize = 0;
const Y: usize = 1;

/// Operations performed so far, one group per offset at which any happened.
type History = Vec<OpSet>;

fn group_of(history: &[OpSet], bit: u64) -> Option<usize> {
    history.iter().position(|g| g.0 & bit != 0)
}

fn allowed(history: &[OpSet], ops: OpSet) -> bool {
    let done = history.iter().fold(0, |acc, g| acc | g.0);
    if done & ops.0 != 0 {
        return false;
    }
    [X, Y].iter().all(|&v| !ops.closes(v) || ops.opens(v) || done & OpSet::open(v) != 0)
}

fn accepts(history: &[OpSet], rel: AllenRelation) -> bool {
    let ends: Option<Vec<usize>> = [OpSet::open(X), OpSet::close(X), OpSet::open(Y), OpSet::close(Y)]
        .iter()
        .map(|&bit| group_of(history, bit))
        .collect();
    match ends.as_deref() {
        Some(&[a, b, c, d]) => rel.basics().iter().any(|r| r.holds_on(a, b, c, d)),
        _ => false,
    }
}

/// The spanner over `{x, y}` whose relation on every document holds exactly
/// the span pairs satisfying `rel`.
///
/// States record the sequence of operation groups performed so far; since
/// the relations depend only on the relative order of the four endpoints,
/// this history is all a run needs to remember.
pub fn relation_spanner(rel: AllenRelation, x: &str, y: &str, alphabet: Alphabet) -> VSetAutomaton {
    assert_ne!(x, y, "an interval relation needs two distinct variables");
    let groups: Vec<OpSet> = (1u64..16)
        .map(|bits| {
            let mut g = 0;
            for (i, bit) in [OpSet::open(X), OpSet::close(X), OpSet::open(Y), OpSet::close(Y)].iter().enumerate() {
                if bits & (1 << i) != 0 {
                    g |= bit;
                }
            }
            OpSet(g)
        })
        .collect();

    // Key: (history, reached by an operation edge).
    let mut keys: Vec<(History, bool)> = vec![(Vec::new(), false)];
    let mut states: Vec<State> = vec![State::default()];
    let mut i = 0;
    while i < keys.len() {
        let (history, post) = keys[i].clone();
        let pre = find_or_add(&mut keys, &mut states, (history.clone(), false));
        states[i].chars.push((alphabet.chars(), pre));
        states[i].accepting = accepts(&history, rel);
        if !post {
            for &g in &groups {
                if allowed(&history, g) {
                    let mut next = history.clone();
                    next.push(g);
                    let to = find_or_add(&mut keys, &mut states, (next, true));
                    states[i].ops.push((g, to));
                }
            }
        }
        i += 1;
    }
    VSetAutomaton::from_parts(alphabet, vec![x.to_string(), y.to_string()], states, 0, true)
}

fn find_or_add(keys: &mut Vec<(History, bool)>, states: &mut Vec<State>, key: (History, bool)) -> StateId {
    match keys.iter().position(|k| *k == key) {
        Some(i) => i as StateId,
        None => {
            keys.push(key);
            states.push(State::default());
            (keys.len() - 1) as StateId
        }
    }
}
