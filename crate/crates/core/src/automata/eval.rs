use super::{AutomatonError, OpSet, Span, SpanRelation, StateId, VSetAutomaton};

/// Incremental all-matches evaluation: feed characters with
/// [`Evaluation::advance`], read the relation for the text so far with
/// [`Evaluation::finish`]. Cloning an evaluation forks it, which lets
/// callers share work across documents with a common prefix.
#[derive(Clone, Debug)]
pub struct Evaluation<'a> {
    aut: &'a VSetAutomaton,
    consumed: u32,
    /// Configurations at pre-operation states: (state, open/close offsets
    /// per variable, 0 when unset).
    configs: Vec<(StateId, Vec<u32>)>,
}

impl<'a> Evaluation<'a> {
    pub fn new(aut: &'a VSetAutomaton) -> Result<Self, AutomatonError> {
        if !aut.is_functional() {
            return Err(AutomatonError::NotFunctional);
        }
        let marks = vec![0; 2 * aut.vars.len()];
        Ok(Evaluation { aut, consumed: 0, configs: vec![(aut.initial, marks)] })
    }

    /// True once no run can be extended.
    pub fn is_dead(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn consumed(&self) -> u32 {
        self.consumed
    }

    /// Configurations after taking at most one operation edge at the current offset.
    fn expanded(&self) -> Vec<(StateId, Vec<u32>)> {
        let offset = self.consumed + 1;
        let nvars = self.aut.vars.len();
        let mut out = self.configs.clone();
        for (s, marks) in &self.configs {
            for &(ops, t) in &self.aut.states[*s as usize].ops {
                out.push((t, apply_ops(marks, ops, offset, nvars)));
            }
        }
        out
    }

    pub fn advance(&mut self, c: u8) {
        if self.configs.is_empty() {
            self.consumed += 1;
            return;
        }
        let mut next = Vec::new();
        for (s, marks) in self.expanded() {
            for &(set, t) in &self.aut.states[s as usize].chars {
                if set.contains(c) {
                    next.push((t, marks.clone()));
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        self.configs = next;
        self.consumed += 1;
    }

    /// The relation of accepting runs over the characters consumed so far.
    pub fn finish(&self) -> SpanRelation {
        let mut rel = SpanRelation::new(self.aut.vars.clone());
        if self.configs.is_empty() {
            return rel;
        }
        for (s, marks) in self.expanded() {
            if self.aut.states[s as usize].accepting {
                let row = marks.chunks(2).map(|m| Span::new(m[0], m[1])).collect();
                rel.insert(row);
            }
        }
        rel
    }
}

fn apply_ops(marks: &[u32], ops: OpSet, offset: u32, nvars: usize) -> Vec<u32> {
    let mut out = marks.to_vec();
    for v in 0..nvars {
        if ops.opens(v) {
            out[2 * v] = offset;
        }
        if ops.closes(v) {
            out[2 * v + 1] = offset;
        }
    }
    out
}

/// All span tuples produced by accepting runs of `aut` on `text`.
pub fn match_all(aut: &VSetAutomaton, text: &str) -> Result<SpanRelation, AutomatonError> {
    let mut eval = Evaluation::new(aut)?;
    for b in text.bytes() {
        eval.advance(b);
        if eval.is_dead() {
            return Ok(SpanRelation::new(aut.vars.clone()));
        }
    }
    Ok(eval.finish())
}
