//! Static checks of sufficient conditions for a program to be stable under
//! domain-preserving updates of its update variables.
//!
//! A program passes when it is domain-consistent, conflict-free, respects
//! the characters of the update model, has only non-expanding joins and
//! selects on no output variable. Every failing sub-check carries a witness.

pub mod constructions;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Leaf, Op, Provenance, SpannerProgram};
use crate::automata::{emptiness, AutomatonError, Emptiness, Inclusion, Nfa, VSetAutomaton, Witness};
use crate::charset::CharSet;
use crate::regex_cv::{
    char_set, classify_variables, contextualize, contextualize_disjuncts, disjunctive_form, enclosed_regex,
    uncovered_unigrams, Exposure, Node, RegexCV,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("`{0}` is not an update variable of the program")]
    UnknownUpdateVariable(String),
    #[error("replacement `{old}` -> `{new}` for `{var}` leaves the variable's domain")]
    NotDomainPreserving { var: String, old: String, new: String },
    #[error("declared output characters {chars} of `{var}` are not in its domain")]
    ForeignOutputChars { var: String, chars: CharSet },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Not evaluated because a prerequisite failed.
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    DomainConsistency,
    CaseI,
    CaseII,
    CaseIII,
    CaseIV,
    InterOverlap,
    RespectsCharacters,
    NonExpanding,
    RestrictedSelection,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::DomainConsistency => "domain-consistency",
            CheckKind::CaseI => "case-i",
            CheckKind::CaseII => "case-ii",
            CheckKind::CaseIII => "case-iii",
            CheckKind::CaseIV => "case-iv",
            CheckKind::InterOverlap => "inter-overlap",
            CheckKind::RespectsCharacters => "respects-characters",
            CheckKind::NonExpanding => "non-expanding",
            CheckKind::RestrictedSelection => "restricted-selection",
        })
    }
}

/// One elementary test, e.g. CaseII for a formula, `v` and one `z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubCheck {
    pub check: CheckKind,
    /// Formula or program node the check is about.
    pub formula: String,
    pub variable: String,
    /// Second formula of a pairwise check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other_formula: Option<String>,
    /// The other variable of the check (`z`, a context, or a join key set).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub against: Option<String>,
    /// 1-based disjunct of the contextualized formula, for CaseIV and
    /// InterOverlap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disjunct: Option<usize>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl SubCheck {
    fn new(check: CheckKind, formula: &str, variable: &str) -> Self {
        SubCheck {
            check,
            formula: formula.to_string(),
            variable: variable.to_string(),
            other_formula: None,
            against: None,
            disjunct: None,
            verdict: Verdict::Pass,
            witness: None,
            detail: None,
        }
    }

    fn against(mut self, z: &str) -> Self {
        self.against = Some(z.to_string());
        self
    }

    fn fail(mut self, detail: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        self.detail = Some(detail.into());
        self
    }

    /// Pass iff the construction is empty; its witness otherwise.
    fn from_construction(mut self, built: Result<VSetAutomaton, AutomatonError>) -> Self {
        match built {
            Err(e) => self.fail(format!("construction failed: {e}")),
            Ok(aut) => {
                if let Emptiness::NonEmpty(w) = emptiness(&aut) {
                    self.verdict = Verdict::Fail;
                    self.witness = Some(w);
                }
                self
            }
        }
    }
}

/// Restricted characters, characters of the update domains, and their overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterSets {
    pub restricted: CharSet,
    pub domain: CharSet,
    pub offending: CharSet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub verdict: Verdict,
    pub checks: Vec<SubCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characters: Option<CharacterSets>,
}

impl Condition {
    fn from_checks(checks: Vec<SubCheck>) -> Self {
        let verdict = if checks.iter().all(|c| c.verdict == Verdict::Pass) { Verdict::Pass } else { Verdict::Fail };
        Condition { verdict, checks, characters: None }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &SubCheck> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

/// How one update variable may be changed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateFunction {
    /// Old value to new value; other values are left alone.
    Mapping(BTreeMap<String, String>),
    /// Any domain-preserving function producing only these characters.
    Opaque { output_chars: CharSet },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UpdateModel {
    pub functions: BTreeMap<String, UpdateFunction>,
}

impl UpdateModel {
    /// Arbitrary domain-preserving updates of every update variable.
    pub fn unrestricted(p: &SpannerProgram) -> Self {
        let functions = p
            .updatable_variables()
            .into_iter()
            .map(|v| {
                let chars = domains(p, &v).iter().fold(CharSet::EMPTY, |acc, d| acc.union(char_set(d, p.alphabet())));
                (v, UpdateFunction::Opaque { output_chars: chars })
            })
            .collect();
        UpdateModel { functions }
    }

    /// Checks that every function is over an update variable and stays
    /// within each of the variable's domains.
    pub fn validate(&self, p: &SpannerProgram) -> Result<(), VerifyError> {
        let vars = p.updatable_variables();
        for (var, f) in &self.functions {
            if !vars.contains(var) {
                return Err(VerifyError::UnknownUpdateVariable(var.clone()));
            }
            let doms = domains(p, var);
            match f {
                UpdateFunction::Mapping(map) => {
                    for nfa in doms.iter().filter_map(|d| Nfa::new(d, p.alphabet()).ok()) {
                        for (old, new) in map {
                            if nfa.accepts(old) && !nfa.accepts(new) {
                                return Err(VerifyError::NotDomainPreserving {
                                    var: var.clone(),
                                    old: old.clone(),
                                    new: new.clone(),
                                });
                            }
                        }
                    }
                }
                UpdateFunction::Opaque { output_chars } => {
                    let allowed = doms.iter().fold(CharSet::EMPTY, |acc, d| acc.union(char_set(d, p.alphabet())));
                    let foreign = output_chars.minus(allowed);
                    if !foreign.is_empty() {
                        return Err(VerifyError::ForeignOutputChars { var: var.clone(), chars: foreign });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub program: String,
    pub update_variables: Vec<String>,
    pub domain_consistent: Condition,
    pub conflict_free: Condition,
    pub respects_characters: Condition,
    pub non_expanding: Condition,
    pub restricted_selection: Condition,
    pub stable: bool,
}

impl VerificationReport {
    pub fn conditions(&self) -> [(&'static str, &Condition); 5] {
        [
            ("domain-consistent", &self.domain_consistent),
            ("conflict-free", &self.conflict_free),
            ("respects-characters", &self.respects_characters),
            ("non-expanding", &self.non_expanding),
            ("restricted-string-selection", &self.restricted_selection),
        ]
    }

    /// Every failing sub-check across all conditions.
    pub fn failures(&self) -> Vec<&SubCheck> {
        self.conditions().into_iter().flat_map(|(_, c)| c.failures()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.stable { "stable" } else { "not-verified" };
        let _ = writeln!(out, "program {}: {verdict}", self.program);
        let _ = writeln!(out, "update variables: {}", self.update_variables.join(", "));
        for (name, cond) in self.conditions() {
            let _ = writeln!(out, "{name}: {}", cond.verdict);
            if let Some(cs) = &cond.characters {
                let _ = writeln!(out, "  restricted {}  domain {}  offending {}", cs.restricted, cs.domain, cs.offending);
            }
            for check in cond.failures() {
                let _ = write!(out, "  {} {} {}", check.check, check.formula, check.variable);
                if let Some(o) = &check.other_formula {
                    let _ = write!(out, " vs {o}");
                }
                if let Some(z) = &check.against {
                    let _ = write!(out, " against {z}");
                }
                if let Some(k) = check.disjunct {
                    let _ = write!(out, " (disjunct {k})");
                }
                out.push('\n');
                if let Some(d) = &check.detail {
                    let _ = writeln!(out, "    {d}");
                }
                if let Some(w) = &check.witness {
                    let _ = writeln!(out, "    document {:?}", w.document);
                    for (c, s) in w.columns.iter().zip(&w.row) {
                        let _ = writeln!(out, "    {c} = [{}, {}⟩ {:?}", s.start, s.end, s.text(&w.document).unwrap_or(""));
                    }
                }
            }
        }
        out
    }
}

/// The regexes enclosed by `v` in each of its provenance formulas, one per
/// disjunct of the disjunctive form.
pub fn domains(p: &SpannerProgram, v: &str) -> Vec<RegexCV> {
    let mut out = Vec::new();
    for prov in p.prov(v).unwrap_or_default() {
        if let Some(leaf) = p.leaf(&prov.formula) {
            out.extend(leaf_domains(leaf, &prov.variable).into_iter().map(|(_, r)| r));
        }
    }
    out
}

/// Enclosed regexes of `v` in `leaf`, labelled by disjunct.
fn leaf_domains(leaf: &Leaf, v: &str) -> Vec<(String, RegexCV)> {
    match disjunctive_form(&leaf.formula, v) {
        Ok(disjuncts) => disjuncts
            .iter()
            .enumerate()
            .filter_map(|(i, d)| {
                let label = if disjuncts.len() == 1 { leaf.name.clone() } else { format!("{}#{}", leaf.name, i + 1) };
                enclosed_regex(d, v).map(|r| (label, r))
            })
            .collect(),
        // Nested or starred captures: every occurrence body.
        Err(_) => capture_bodies(leaf.formula.root(), v)
            .into_iter()
            .enumerate()
            .map(|(i, b)| (format!("{}@{}", leaf.name, i + 1), RegexCV::new(b.filter_captures(&|_| false))))
            .collect(),
    }
}

fn capture_bodies<'a>(node: &'a Node, v: &str) -> Vec<&'a Node> {
    let mut out = Vec::new();
    if let Node::Capture(name, body) = node {
        if name == v {
            out.push(&**body);
        }
    }
    for c in node.children() {
        out.extend(capture_bodies(c, v));
    }
    out
}

pub fn first_exposed(r: &RegexCV) -> Option<String> {
    let info = classify_variables(r);
    r.svars().into_iter().find(|v| info[v].exposure == Exposure::Exposed)
}

/// All domains of each update variable must be equivalent.
pub fn check_domain_consistency(p: &SpannerProgram) -> Condition {
    let mut checks = Vec::new();
    for v in p.updatable_variables() {
        let mut labelled = Vec::new();
        for Provenance { formula, variable } in p.prov(&v).unwrap_or_default() {
            if let Some(leaf) = p.leaf(&formula) {
                labelled.extend(leaf_domains(leaf, &variable).into_iter().map(|(l, r)| (format!("{l}.{variable}"), r)));
            }
        }
        let Some((first_label, first)) = labelled.first() else { continue };
        let Ok(first_nfa) = Nfa::new(first, p.alphabet()) else { continue };
        let mut check = SubCheck::new(CheckKind::DomainConsistency, first_label, &v);
        if labelled.len() == 1 {
            checks.push(check);
            continue;
        }
        for (label, r) in &labelled[1..] {
            check = SubCheck::new(CheckKind::DomainConsistency, first_label, &v);
            check.other_formula = Some(label.clone());
            let other = match Nfa::new(r, p.alphabet()) {
                Ok(n) => n,
                Err(e) => {
                    checks.push(check.fail(format!("domain does not compile: {e}")));
                    continue;
                }
            };
            let diff = [(&first_nfa, &other, first_label, label), (&other, &first_nfa, label, first_label)]
                .into_iter()
                .find_map(|(a, b, la, lb)| match a.included_in(b) {
                    Inclusion::Included => None,
                    Inclusion::Counterexample(w) => Some((w, la.clone(), lb.clone())),
                });
            if let Some((word, inside, outside)) = diff {
                check = check.fail(format!("{word:?} is in the domain of {inside} but not of {outside}"));
                check.witness = Some(Witness { document: word, columns: Vec::new(), row: Vec::new() });
            }
            checks.push(check);
        }
    }
    Condition::from_checks(checks)
}

/// CaseI: spans of `v` never overlap unless equal.
pub fn check_case1(leaf: &Leaf, v: &str) -> SubCheck {
    SubCheck::new(CheckKind::CaseI, &leaf.name, v).from_construction(constructions::case1(&leaf.automaton, v))
}

/// CaseII: a span of `v` occurs in at most one row, one sub-check per `z`.
pub fn check_case2(leaf: &Leaf, v: &str) -> Vec<SubCheck> {
    others(leaf, v)
        .map(|z| {
            SubCheck::new(CheckKind::CaseII, &leaf.name, v)
                .against(&z)
                .from_construction(constructions::case2(&leaf.automaton, v, &z))
        })
        .collect()
}

/// CaseIII: spans of `v` overlap no span of another variable.
pub fn check_case3(leaf: &Leaf, v: &str) -> Vec<SubCheck> {
    others(leaf, v)
        .map(|z| {
            SubCheck::new(CheckKind::CaseIII, &leaf.name, v)
                .against(&z)
                .from_construction(constructions::case3(&leaf.automaton, v, &z))
        })
        .collect()
}

fn others<'a>(leaf: &'a Leaf, v: &'a str) -> impl Iterator<Item = String> + 'a {
    leaf.formula.svars().into_iter().filter(move |z| z != v)
}

/// CaseIV: spans of `v` overlap neither contexts nor other variables of the
/// formula contextualized by `v`.
pub fn check_case4(leaf: &Leaf, v: &str) -> Vec<SubCheck> {
    let alphabet = leaf.automaton.alphabet();
    let disjuncts = match contextualize_disjuncts(&leaf.formula, v) {
        Ok(d) => d,
        Err(e) => return vec![SubCheck::new(CheckKind::CaseIV, &leaf.name, v).fail(format!("cannot contextualize: {e}"))],
    };
    let mut out = Vec::new();
    for (k, d) in disjuncts.iter().enumerate() {
        let aut = VSetAutomaton::compile(&d.formula, alphabet);
        for z in d.formula.svars().into_iter().filter(|z| z != v) {
            let mut check = SubCheck::new(CheckKind::CaseIV, &leaf.name, v).against(&z);
            check.disjunct = Some(k + 1);
            let built = aut.clone().and_then(|a| constructions::cross_overlap(&leaf.automaton, v, &a, &z));
            out.push(check.from_construction(built));
        }
    }
    out
}

/// Spans of `v` in `leaf` overlap nothing that `other` consumes, taking
/// `other` contextualized by its first exposed variable.
pub fn check_inter_overlap(leaf: &Leaf, other: &Leaf, v: &str) -> Vec<SubCheck> {
    let base = || {
        let mut c = SubCheck::new(CheckKind::InterOverlap, &leaf.name, v);
        c.other_formula = Some(other.name.clone());
        c
    };
    let Some(pivot) = first_exposed(&other.formula) else {
        return vec![base().fail("no exposed variable to contextualize by")];
    };
    let disjuncts = match contextualize_disjuncts(&other.formula, &pivot) {
        Ok(d) => d,
        Err(e) => return vec![base().fail(format!("cannot contextualize by {pivot}: {e}"))],
    };
    let alphabet = other.automaton.alphabet();
    let mut out = Vec::new();
    for (k, d) in disjuncts.iter().enumerate() {
        let aut = VSetAutomaton::compile(&d.formula, alphabet);
        for z in d.formula.svars() {
            let built = aut.clone().and_then(|a| constructions::cross_overlap(&leaf.automaton, v, &a, &z));
            let mut check = base().against(&z);
            check.disjunct = Some(k + 1);
            out.push(check.from_construction(built));
        }
    }
    out
}

/// Rebuilds the construction a CaseI to IV or InterOverlap sub-check ran
/// emptiness on.
pub fn construction_for(p: &SpannerProgram, check: &SubCheck) -> Option<Result<VSetAutomaton, AutomatonError>> {
    let leaf = p.leaf(&check.formula)?;
    let v = check.variable.as_str();
    let z = check.against.as_deref();
    let contextualized = |target: &Leaf, pivot: &str| -> Option<Result<VSetAutomaton, AutomatonError>> {
        let d = contextualize_disjuncts(&target.formula, pivot).ok()?.into_iter().nth(check.disjunct? - 1)?;
        Some(VSetAutomaton::compile(&d.formula, target.automaton.alphabet()))
    };
    Some(match check.check {
        CheckKind::CaseI => constructions::case1(&leaf.automaton, v),
        CheckKind::CaseII => constructions::case2(&leaf.automaton, v, z?),
        CheckKind::CaseIII => constructions::case3(&leaf.automaton, v, z?),
        CheckKind::CaseIV => {
            let z = z?;
            contextualized(leaf, v)?.and_then(|d| constructions::cross_overlap(&leaf.automaton, v, &d, z))
        }
        CheckKind::InterOverlap => {
            let other = p.leaf(check.other_formula.as_deref()?)?;
            let (pivot, z) = (first_exposed(&other.formula)?, z?);
            contextualized(other, &pivot)?.and_then(|d| constructions::cross_overlap(&leaf.automaton, v, &d, z))
        }
        _ => return None,
    })
}

/// Cases I to IV for every provenance formula of every update variable,
/// then InterOverlap against every other formula.
pub fn check_conflict_free(p: &SpannerProgram) -> Condition {
    let mut checks = Vec::new();
    let leaves = p.leaves();
    let mut done = BTreeSet::new();
    for v in p.updatable_variables() {
        for prov in p.prov(&v).unwrap_or_default() {
            if !done.insert((prov.formula.clone(), prov.variable.clone())) {
                continue;
            }
            let Some(leaf) = p.leaf(&prov.formula) else { continue };
            let local = prov.variable.as_str();
            checks.push(check_case1(leaf, local));
            checks.extend(check_case2(leaf, local));
            checks.extend(check_case3(leaf, local));
            checks.extend(check_case4(leaf, local));
            for other in leaves.iter().filter(|o| o.name != leaf.name) {
                checks.extend(check_inter_overlap(leaf, other, local));
            }
        }
    }
    Condition::from_checks(checks)
}

/// Skipped unless the program is conflict-free.
pub fn check_respects_characters(p: &SpannerProgram, u: &UpdateModel, conflict_free: bool) -> Condition {
    let sigma = p.alphabet();
    let restricted = restricted_characters(p);
    let mut domain = CharSet::EMPTY;
    for v in p.updatable_variables() {
        for d in domains(p, &v) {
            domain = domain.union(char_set(&d, sigma));
        }
    }
    for f in u.functions.values() {
        if let UpdateFunction::Opaque { output_chars } = f {
            domain = domain.union(*output_chars);
        }
    }
    let offending = restricted.intersect(domain);
    let characters = Some(CharacterSets { restricted, domain, offending });
    if !conflict_free {
        return Condition { verdict: Verdict::Skipped, checks: Vec::new(), characters };
    }
    let mut checks = Vec::new();
    if !offending.is_empty() {
        checks.push(
            SubCheck::new(CheckKind::RespectsCharacters, &p.node(p.output()).label, &p.updatable_variables().join(","))
                .fail(format!("update domains use restricted characters {offending}")),
        );
    }
    let mut cond = Condition::from_checks(checks);
    cond.characters = characters;
    cond
}

/// Characters excluded by some star over a character class that lies
/// outside every capture of a contextualized formula.
pub fn restricted_characters(p: &SpannerProgram) -> CharSet {
    let sigma = p.alphabet();
    let mut out = CharSet::EMPTY;
    for leaf in p.leaves() {
        let formula = first_exposed(&leaf.formula)
            .and_then(|v| contextualize(&leaf.formula, &v).ok())
            .unwrap_or_else(|| leaf.formula.clone());
        for (_, class) in uncovered_unigrams(&formula, sigma) {
            out = out.union(sigma.chars().minus(class));
        }
    }
    out
}

/// Every join needs shared keys that determine both operands through the
/// declared dependencies of the join node and its operands.
pub fn check_non_expanding(p: &SpannerProgram) -> Condition {
    let mut checks = Vec::new();
    for id in p.reachable() {
        let node = p.node(id);
        let Op::Join(a, b) = node.op else { continue };
        let (left, right) = (&p.node(a).schema, &p.node(b).schema);
        let keys: BTreeSet<String> = left.iter().filter(|v| right.contains(v)).cloned().collect();
        let key_list = keys.iter().cloned().collect::<Vec<_>>().join(",");
        let check = SubCheck::new(CheckKind::NonExpanding, &node.label, &key_list);
        if keys.is_empty() {
            checks.push(check.fail("join has no shared variables"));
            continue;
        }
        let fds: Vec<_> = p.functional_dependencies().iter().filter(|fd| [id, a, b].contains(&fd.node)).collect();
        let mut closure = keys.clone();
        loop {
            let before = closure.len();
            for fd in &fds {
                if fd.determinant.is_subset(&closure) {
                    closure.extend(fd.dependents.iter().cloned());
                }
            }
            if closure.len() == before {
                break;
            }
        }
        let missing: Vec<String> = left.iter().chain(right).filter(|v| !closure.contains(*v)).cloned().collect();
        let mut seen = BTreeSet::new();
        let missing: Vec<String> = missing.into_iter().filter(|v| seen.insert(v.clone())).collect();
        if missing.is_empty() {
            checks.push(check);
        } else {
            checks.push(check.fail(format!("{{{key_list}}} does not determine {{{}}}", missing.join(","))));
        }
    }
    Condition::from_checks(checks)
}

/// No string selection may compare an output variable.
pub fn check_restricted_selection(p: &SpannerProgram) -> Condition {
    let output = p.output_schema();
    let mut checks = Vec::new();
    for id in p.reachable() {
        let node = p.node(id);
        let Op::Select(_, x, y) = &node.op else { continue };
        let mut check = SubCheck::new(CheckKind::RestrictedSelection, &node.label, x).against(y);
        let hits: Vec<&String> = [x, y].into_iter().filter(|v| output.contains(v)).collect();
        if !hits.is_empty() {
            let names: Vec<&str> = hits.iter().map(|s| s.as_str()).collect();
            check = check.fail(format!("selection compares output variable {}", names.join(" and ")));
        }
        checks.push(check);
    }
    Condition::from_checks(checks)
}

/// Runs every check; the program is stable iff all five conditions pass.
pub fn verify_stability(p: &SpannerProgram, u: &UpdateModel) -> Result<VerificationReport, VerifyError> {
    u.validate(p)?;
    let domain_consistent = check_domain_consistency(p);
    let conflict_free = check_conflict_free(p);
    let respects_characters = check_respects_characters(p, u, conflict_free.passed());
    let non_expanding = check_non_expanding(p);
    let restricted_selection = check_restricted_selection(p);
    let stable = domain_consistent.passed()
        && conflict_free.passed()
        && respects_characters.passed()
        && non_expanding.passed()
        && restricted_selection.passed();
    Ok(VerificationReport {
        program: p.node(p.output()).label.clone(),
        update_variables: p.updatable_variables(),
        domain_consistent,
        conflict_free,
        respects_characters,
        non_expanding,
        restricted_selection,
        stable,
    })
}

/// Shorthand for [`verify_stability`] under [`UpdateModel::unrestricted`].
pub fn verify(p: &SpannerProgram) -> VerificationReport {
    verify_stability(p, &UpdateModel::unrestricted(p)).expect("the unrestricted model is valid")
}
