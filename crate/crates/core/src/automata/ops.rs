use std::collections::{BTreeMap, HashMap};

use super::{AutomatonError, OpSet, State, StateId, VSetAutomaton};

/// Moves each variable's op bits from index `i` to `map[i]`; `None` drops them.
fn remap(ops: OpSet, map: &[Option<usize>]) -> OpSet {
    let mut bits = 0;
    for (i, target) in map.iter().enumerate() {
        if let Some(j) = *target {
            if ops.opens(i) {
                bits |= OpSet::open(j);
            }
            if ops.closes(i) {
                bits |= OpSet::close(j);
            }
        }
    }
    OpSet(bits)
}

/// Runs of either operand. Variables of `b` are aligned to `a`'s order.
pub fn union_a(a: &VSetAutomaton, b: &VSetAutomaton) -> Result<VSetAutomaton, AutomatonError> {
    if a.alphabet != b.alphabet {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let mut sa = a.vars.clone();
    let mut sb = b.vars.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Err(AutomatonError::NotUnionCompatible { left: a.vars.clone(), right: b.vars.clone() });
    }
    let map: Vec<Option<usize>> = b.vars.iter().map(|v| a.var_index(v)).collect();
    let na = a.states.len() as StateId;
    let nb = b.states.len() as StateId;
    let mut states: Vec<State> = a.states.clone();
    for st in &b.states {
        states.push(State {
            accepting: st.accepting,
            chars: st.chars.iter().map(|&(c, t)| (c, t + na)).collect(),
            ops: st.ops.iter().map(|&(o, t)| (remap(o, &map), t + na)).collect(),
        });
    }
    let ia = &states[a.initial as usize];
    let ib = &states[(b.initial + na) as usize];
    let start = State {
        accepting: ia.accepting || ib.accepting,
        chars: ia.chars.iter().chain(&ib.chars).copied().collect(),
        ops: ia.ops.iter().chain(&ib.ops).copied().collect(),
    };
    states.push(start);
    Ok(VSetAutomaton::from_parts(
        a.alphabet,
        a.vars.clone(),
        states,
        na + nb,
        a.functional && b.functional,
    ))
}

/// Keeps only the listed variables; the others' operations become silent.
pub fn project_a(a: &VSetAutomaton, keep: &[String]) -> Result<VSetAutomaton, AutomatonError> {
    for k in keep {
        if a.var_index(k).is_none() {
            return Err(AutomatonError::UnknownVariable(k.clone()));
        }
    }
    let vars: Vec<String> = a.vars.iter().filter(|v| keep.contains(v)).cloned().collect();
    let map: Vec<Option<usize>> =
        a.vars.iter().map(|v| vars.iter().position(|w| w == v)).collect();
    let mut states = a.states.clone();
    for (s, st) in a.states.iter().enumerate() {
        let mut ops = Vec::new();
        for &(o, t) in &st.ops {
            let o = remap(o, &map);
            if o.is_empty() {
                // A silent edge into a post-state: inline that state's character
                // edges and acceptance (post-states have no op edges).
                let target = &a.states[t as usize];
                states[s].chars.extend(target.chars.iter().copied());
                states[s].accepting |= target.accepting;
            } else {
                ops.push((o, t));
            }
        }
        states[s].ops = ops;
    }
    Ok(VSetAutomaton::from_parts(a.alphabet, vars, states, a.initial, a.functional))
}

/// Renames variables; the mapping must be injective on the result.
pub fn rename_a(
    a: &VSetAutomaton,
    mapping: &BTreeMap<String, String>,
) -> Result<VSetAutomaton, AutomatonError> {
    for from in mapping.keys() {
        if a.var_index(from).is_none() {
            return Err(AutomatonError::UnknownVariable(from.clone()));
        }
    }
    let vars: Vec<String> =
        a.vars.iter().map(|v| mapping.get(v).cloned().unwrap_or_else(|| v.clone())).collect();
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(AutomatonError::RenameCollision(v.clone()));
        }
    }
    let mut out = a.clone();
    out.vars = vars;
    Ok(out)
}

/// Natural join: runs of both operands over the same document that agree
/// on the spans of shared variables. Result variables are `a`'s followed by
/// `b`'s others.
pub fn join_a(a: &VSetAutomaton, b: &VSetAutomaton) -> Result<VSetAutomaton, AutomatonError> {
    if a.alphabet != b.alphabet {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let mut vars = a.vars.clone();
    for v in &b.vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    if vars.len() > super::MAX_VARS {
        return Err(AutomatonError::TooManyVariables(vars.len()));
    }
    let map_b: Vec<Option<usize>> = b.vars.iter().map(|v| vars.iter().position(|w| w == v)).collect();
    let shared = b
        .vars
        .iter()
        .filter_map(|v| a.var_index(v))
        .fold(0u64, |acc, i| acc | OpSet::open(i) | OpSet::close(i));

    type Key = (StateId, StateId, bool);
    let mut ids: HashMap<Key, StateId> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut work: Vec<Key> = Vec::new();
    fn intern(key: Key, ids: &mut HashMap<Key, StateId>, states: &mut Vec<State>, work: &mut Vec<Key>) -> StateId {
        *ids.entry(key).or_insert_with(|| {
            states.push(State::default());
            work.push(key);
            (states.len() - 1) as StateId
        })
    }
    let b_ops: Vec<Vec<(OpSet, StateId)>> = b
        .states
        .iter()
        .map(|st| st.ops.iter().map(|&(o, t)| (remap(o, &map_b), t)).collect())
        .collect();

    let initial = intern((a.initial, b.initial, false), &mut ids, &mut states, &mut work);
    while let Some(key) = work.pop() {
        let (pa, pb, post) = key;
        let id = ids[&key] as usize;
        let (xa, xb) = (&a.states[pa as usize], &b.states[pb as usize]);
        states[id].accepting = xa.accepting && xb.accepting;
        for &(ca, ta) in &xa.chars {
            for &(cb, tb) in &xb.chars {
                let c = ca.intersect(cb);
                if !c.is_empty() {
                    let to = intern((ta, tb, false), &mut ids, &mut states, &mut work);
                    states[id].chars.push((c, to));
                }
            }
        }
        if post {
            continue;
        }
        for &(oa, ta) in &xa.ops {
            if oa.0 & shared == 0 {
                let to = intern((ta, pb, true), &mut ids, &mut states, &mut work);
                states[id].ops.push((oa, to));
            }
            for &(ob, tb) in &b_ops[pb as usize] {
                if oa.0 & shared == ob.0 & shared {
                    let to = intern((ta, tb, true), &mut ids, &mut states, &mut work);
                    states[id].ops.push((OpSet(oa.0 | ob.0), to));
                }
            }
        }
        for &(ob, tb) in &b_ops[pb as usize] {
            if ob.0 & shared == 0 {
                let to = intern((pa, tb, true), &mut ids, &mut states, &mut work);
                states[id].ops.push((ob, to));
            }
        }
    }
    Ok(VSetAutomaton::from_parts(a.alphabet, vars, states, initial, a.functional && b.functional))
}
