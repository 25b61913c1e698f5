mod common;

use std::collections::BTreeMap;

use common::oracle::Oracle;
use common::{rows_in, rx, sp};
use spanclean::automata::{
    compile, emptiness, join_a, match_all, project_a, rename_a, union_a, AutomatonError, Inclusion,
    Nfa, SpanRelation, VSetAutomaton,
};
use spanclean::Alphabet;

fn aut(src: &str) -> VSetAutomaton {
    compile(&rx(src), Alphabet::printable()).unwrap()
}

fn agrees_with_oracle(src: &str, doc: &str) {
    let r = rx(src);
    let a = compile(&r, Alphabet::printable()).unwrap();
    let got = match_all(&a, doc).unwrap();
    let o = Oracle::new(&r, Alphabet::printable());
    let expected = SpanRelation::with_rows(o.vars().to_vec(), o.match_text(doc));
    assert_eq!(got.reorder(o.vars()), expected, "{src} on {doc:?}");
}

const DATE: &str = r#"Σ* mdate="F{Y{[0-9][0-9][0-9][0-9]}-M{[0-9][0-9]}-D{[0-9][0-9]}}" Σ*"#;

#[test]
fn single_char_has_two_states() {
    let a = aut("a");
    assert_eq!(a.state_count(), 2);
    assert_eq!(a.edge_count(), 1);
}

#[test]
fn date_formula_on_attribute() {
    let a = aut(DATE);
    let rel = match_all(&a, r#"mdate="2024-03-15""#).unwrap();
    assert_eq!(rows_in(&rel, &["F", "Y", "M", "D"]), vec![vec![sp(8, 18), sp(8, 12), sp(13, 15), sp(16, 18)]]);
    agrees_with_oracle(DATE, r#"mdate="2024-03-15""#);
}

#[test]
fn symmetric_alternatives() {
    let a = aut("x{a}∨x{b}");
    for doc in ["a", "b"] {
        let rel = match_all(&a, doc).unwrap();
        assert_eq!(rows_in(&rel, &["x"]), vec![vec![sp(1, 2)]]);
    }
    assert!(match_all(&a, "c").unwrap().is_empty());
}

#[test]
fn functionality() {
    assert!(!aut("(x{a})*").is_functional());
    assert!(!aut("x{a} ∨ b").is_functional());
    assert!(!aut("x{a} x{b}").is_functional());
    assert!(aut("x{a} y{b*} ∨ y{c} x{ε}").is_functional());
    assert_eq!(match_all(&aut("(x{a})*"), "aa"), Err(AutomatonError::NotFunctional));
}

#[test]
fn all_matches_against_oracle() {
    let cases = [
        ("Σ* x{a*} Σ*", "baab"),
        ("Σ* x{Σ*} y{Σ*} Σ*", "abc"),
        ("x{a* b} ∨ x{a} b*", "aab"),
        ("Σ* x{y{a} b ∨ b y{a}} Σ*", "abba"),
        ("(a ∨ ε)* x{ε} (b ∨ ε)*", "ab"),
        (r"Σ* x{[a-c]* \-} Σ*", "ab-c-"),
    ];
    for (src, doc) in cases {
        agrees_with_oracle(src, doc);
    }
}

#[test]
fn rejecting_document_gives_empty_relation() {
    assert!(match_all(&aut("x{ab}"), "ba").unwrap().is_empty());
    assert!(match_all(&aut("x{∅}"), "").unwrap().is_empty());
}

#[test]
fn emptiness_witness() {
    let e = emptiness(&aut("a x{b}"));
    let w = e.witness().expect("nonempty");
    assert_eq!(w.document, "ab");
    assert_eq!(w.row, vec![sp(2, 3)]);
    assert!(emptiness(&aut("a x{∅}")).is_empty());
    assert!(emptiness(&aut("x{a} ∨ ∅")).witness().is_some());
}

#[test]
fn witnesses_reverify() {
    for src in ["Σ* x{a b*} Σ* y{c} ", "x{ε} ∨ b x{ε}", "[0-9]* x{[0-9]} y{-} z{ε}"] {
        let a = aut(src);
        let w = emptiness(&a).witness().cloned().expect("nonempty");
        let rel = match_all(&a, &w.document).unwrap();
        let expected = SpanRelation::with_rows(w.columns.clone(), [w.row.clone()]);
        assert!(rel.reorder(&w.columns).contains(&w.row), "{src}: {w:?} not in {rel}");
        assert_eq!(expected.len(), 1);
    }
}

#[test]
fn shortest_smallest_witness() {
    let w = emptiness(&aut("x{b ∨ a ∨ cc}")).witness().cloned().unwrap();
    assert_eq!(w.document, "a");
}

#[test]
fn union_of_automata() {
    let u = union_a(&aut("x{a} b"), &aut("a x{b}")).unwrap();
    let rel = match_all(&u, "ab").unwrap();
    assert_eq!(rows_in(&rel, &["x"]), vec![vec![sp(1, 2)], vec![sp(2, 3)]]);
    assert!(matches!(union_a(&aut("x{a}"), &aut("y{a}")), Err(AutomatonError::NotUnionCompatible { .. })));
}

#[test]
fn union_aligns_variable_order() {
    let u = union_a(&aut("x{a} y{b}"), &aut("y{a} x{b}")).unwrap();
    let rel = match_all(&u, "ab").unwrap();
    assert_eq!(rows_in(&rel, &["x", "y"]), vec![vec![sp(1, 2), sp(2, 3)], vec![sp(2, 3), sp(1, 2)]]);
}

#[test]
fn projection() {
    let a = aut("Σ* x{a} y{b*} Σ*");
    let p = project_a(&a, &["x".to_string()]).unwrap();
    assert_eq!(p.variables(), ["x"]);
    let rel = match_all(&p, "abab").unwrap();
    assert_eq!(rows_in(&rel, &["x"]), vec![vec![sp(1, 2)], vec![sp(3, 4)]]);
    let none = project_a(&a, &[]).unwrap();
    assert_eq!(match_all(&none, "ab").unwrap().len(), 1);
    assert!(match_all(&none, "").unwrap().is_empty());
    assert_eq!(project_a(&a, &["q".to_string()]).unwrap_err(), AutomatonError::UnknownVariable("q".into()));
}

#[test]
fn join_agrees_with_relation_join() {
    let pairs = [
        ("Σ* x{a} Σ*", "Σ* x{Σ} b Σ*", "aabab"),
        ("Σ* x{a*} Σ*", "Σ* y{b} Σ*", "abab"),
        ("Σ* x{Σ*} y{b} Σ*", "Σ* y{Σ} z{Σ*} Σ*", "abba"),
        ("Σ* x{ε} Σ*", "Σ* x{ε} a Σ*", "baa"),
    ];
    for (l, r, doc) in pairs {
        let (a, b) = (aut(l), aut(r));
        let joined = join_a(&a, &b).unwrap();
        let expected = match_all(&a, doc).unwrap().join(&match_all(&b, doc).unwrap());
        let got = match_all(&joined, doc).unwrap();
        assert_eq!(got.reorder(expected.columns()), expected, "{l} ⋈ {r} on {doc}");
    }
}

#[test]
fn rename() {
    let a = aut("x{a} y{b}");
    let m: BTreeMap<String, String> = [("x".to_string(), "z".to_string())].into();
    let r = rename_a(&a, &m).unwrap();
    assert_eq!(r.variables(), ["z", "y"]);
    let clash: BTreeMap<String, String> = [("x".to_string(), "y".to_string())].into();
    assert_eq!(rename_a(&a, &clash).unwrap_err(), AutomatonError::RenameCollision("y".into()));
    let unknown: BTreeMap<String, String> = [("q".to_string(), "r".to_string())].into();
    assert!(rename_a(&a, &unknown).is_err());
}

#[test]
fn language_inclusion() {
    let sigma = Alphabet::printable();
    let ab = Nfa::new(&rx("a b*"), sigma).unwrap();
    let ab2 = Nfa::new(&rx("a (b ∨ bb)*"), sigma).unwrap();
    let a_only = Nfa::new(&rx("a"), sigma).unwrap();
    assert_eq!(ab.included_in(&ab2), Inclusion::Included);
    assert_eq!(ab2.included_in(&ab), Inclusion::Included);
    assert_eq!(ab.included_in(&a_only), Inclusion::Counterexample("ab".into()));
    assert!(ab.accepts("abbb"));
    assert!(!ab.accepts("ba"));
}

#[test]
fn dot_output_mentions_every_state() {
    let a = aut("x{a}");
    let dot = a.to_dot();
    for s in 0..a.state_count() {
        assert!(dot.contains(&format!("q{s} [")));
    }
}
