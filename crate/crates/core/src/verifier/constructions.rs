//! Spanners whose nonemptiness exhibits a conflict between extracted spans.
//!
//! Every construction has the two fresh variables [`X`] and [`Y`] and is
//! built from the compiled formulas with rename, projection and join.

use std::collections::BTreeMap;

use crate::allen::{relation_spanner, AllenRelation};
use crate::automata::{join_a, project_a, rename_a, AutomatonError, VSetAutomaton};

pub const X: &str = "#X";
pub const Y: &str = "#Y";

/// `π_{to, keep..}(ρ_{from→to} a)`.
fn pick(a: &VSetAutomaton, from: &str, to: &str, keep: &[&str]) -> Result<VSetAutomaton, AutomatonError> {
    let renamed = rename_a(a, &BTreeMap::from([(from.to_string(), to.to_string())]))?;
    let mut cols = vec![to.to_string()];
    cols.extend(keep.iter().map(|k| k.to_string()));
    project_a(&renamed, &cols)
}

fn sandwich(left: &VSetAutomaton, rel: AllenRelation, right: &VSetAutomaton) -> Result<VSetAutomaton, AutomatonError> {
    let middle = relation_spanner(rel, X, Y, left.alphabet());
    join_a(&join_a(left, &middle)?, right)
}

/// Two `v` spans of `e` that overlap without being equal.
pub fn case1(e: &VSetAutomaton, v: &str) -> Result<VSetAutomaton, AutomatonError> {
    let side_x = pick(e, v, X, &[])?;
    let side_y = pick(e, v, Y, &[])?;
    sandwich(&side_x, AllenRelation::OverlapNotEqual, &side_y)
}

/// One `v` span paired with two different `z` spans.
pub fn case2(e: &VSetAutomaton, v: &str, z: &str) -> Result<VSetAutomaton, AutomatonError> {
    let side_x = pick(e, z, X, &[v])?;
    let side_y = pick(e, z, Y, &[v])?;
    sandwich(&side_x, AllenRelation::NotEqual, &side_y)
}

/// A `v` span overlapping a `z` span, possibly of another row.
pub fn case3(e: &VSetAutomaton, v: &str, z: &str) -> Result<VSetAutomaton, AutomatonError> {
    let side_x = pick(e, v, X, &[])?;
    let side_y = pick(e, z, Y, &[])?;
    sandwich(&side_x, AllenRelation::Overlap, &side_y)
}

/// A `v` span of `e` overlapping the span of `z` in `other`, which is
/// typically a contextualized formula.
pub fn cross_overlap(
    e: &VSetAutomaton,
    v: &str,
    other: &VSetAutomaton,
    z: &str,
) -> Result<VSetAutomaton, AutomatonError> {
    let side_x = pick(e, v, X, &[])?;
    let side_y = pick(other, z, Y, &[])?;
    sandwich(&side_x, AllenRelation::Overlap, &side_y)
}
