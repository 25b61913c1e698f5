mod common;

use std::path::PathBuf;

use common::sp;
use spanclean::algebra::{Op, ProgramError, Provenance, SpannerProgram};

fn programs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs")
}

fn load(name: &str) -> SpannerProgram {
    SpannerProgram::from_file(&programs_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn prov(p: &SpannerProgram, v: &str) -> Vec<(String, String)> {
    p.prov(v).unwrap().into_iter().map(|Provenance { formula, variable }| (formula, variable)).collect()
}

fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn all_programs_load() {
    for entry in std::fs::read_dir(programs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if name == "primitives.prog" || name == "order_formulas.prog" {
            continue;
        }
        load(&name);
    }
}

#[test]
fn date_program_shape() {
    let p = load("date.prog");
    assert_eq!(p.leaves().iter().map(|l| l.name.as_str()).collect::<Vec<_>>(), ["E1", "E2", "E3"]);
    assert_eq!(p.output_schema(), ["D"]);
    assert_eq!(prov(&p, "D"), pairs(&[("E1", "D"), ("E2", "D"), ("E3", "D")]));
    assert_eq!(p.updatable_variables(), ["D"]);
    assert_eq!(p.node(p.output()).label, "E_date");
}

#[test]
fn valcon_is_a_join() {
    let p = load("valcon.prog");
    assert!(matches!(p.node(p.output()).op, Op::Join(..)));
    assert_eq!(prov(&p, "D1"), pairs(&[("E5", "D1")]));
    assert_eq!(p.output_schema(), ["R", "T1", "D1", "T2", "D2"]);
    assert_eq!(p.functional_dependencies().len(), 1);
}

#[test]
fn provenance_follows_renames() {
    let p = load("order_union.prog");
    assert_eq!(prov(&p, "D1"), pairs(&[("E7", "D1"), ("E8", "D1"), ("E9", "D2")]));
}

#[test]
fn provenance_stops_at_projection() {
    let src = "let A = ⟦x{a} y{b}⟧; let B = ⟦x{a} y{c}⟧; output π{x}(A) ∪ π{x}(B);";
    let p = SpannerProgram::parse(src, "t", None).unwrap();
    assert_eq!(prov(&p, "x"), pairs(&[("A", "x"), ("B", "x")]));
    assert!(p.prov("y").is_err());
    assert_eq!(p.updatable_variables(), ["x"]);
}

#[test]
fn union_schema_mismatch() {
    let err = SpannerProgram::parse("let A = ⟦x{a}⟧; let B = ⟦y{a}⟧; output A ∪ B;", "t", None).unwrap_err();
    assert!(matches!(err, ProgramError::SchemaMismatch { .. }), "{err}");
}

#[test]
fn build_errors() {
    let cases = [
        ("let A = ⟦(x{a})*⟧; output A;", "not functional"),
        ("let A = ⟦abc⟧; output A;", "no exposed variable"),
        ("let A = B; let B = A; output A;", "refers to itself"),
        ("output Missing;", "unknown name"),
        ("let A = ⟦x{a}⟧;", "no output"),
        ("let A = ⟦x{(a⟧; output A;", "t:1:14"),
        ("let A = ⟦x{a}⟧;\noutput π{q}(A);", "unknown variable `q`"),
        ("let A = ⟦x{a} y{b}⟧; output ρ{x -> y}(A);", "produces variable `y` twice"),
        ("let A = ⟦x{a}⟧; update-vars {z}; output A;", "update variable `z`"),
        ("let A = ⟦x{a}⟧; fd Q: {x} -> {x}; output A;", "unknown node `Q`"),
        ("let A = ⟦x{a}⟧; let A = ⟦x{b}⟧; output A;", "defined twice"),
        ("let A = ⟦x{a}⟧ output A;", "expected `;`"),
    ];
    for (src, needle) in cases {
        let err = SpannerProgram::parse(src, "t", None).unwrap_err().to_string();
        assert!(err.contains(needle), "{src}: {err}");
    }
}

#[test]
fn evaluation_operators() {
    let src = r#"
        alphabet "ab ";
        let A = ⟦Σ* x{a a*} ␣ y{b b*} Σ*⟧;
        let B = ⟦Σ* y{b b*} ␣ z{a a*} Σ*⟧;
        output J = A ⋈ B;
    "#;
    let p = SpannerProgram::parse(src, "t", None).unwrap();
    assert!(p.declares_alphabet());
    let rel = p.evaluate("a bb a");
    assert_eq!(rel.columns(), ["x", "y", "z"]);
    assert_eq!(rel.rows().cloned().collect::<Vec<_>>(), vec![vec![sp(1, 2), sp(3, 5), sp(6, 7)]]);
    assert!(p.evaluate("").is_empty());
}

#[test]
fn string_selection() {
    let src = "let A = ⟦Σ* x{[a-z]} Σ* y{[a-z]} Σ*⟧; output ζ{x, y}(A);";
    let p = SpannerProgram::parse(src, "t", None).unwrap();
    let rel = p.evaluate("abca");
    assert_eq!(rel.rows().cloned().collect::<Vec<_>>(), vec![vec![sp(1, 2), sp(4, 5)]]);
}

#[test]
fn union_distributes_over_evaluation() {
    let p = load("date.prog");
    let doc = "x admitted 2005-03-01.\nDISCHARGE DATE :\n20050305\nAdmission Date :\n03/01/2005\n";
    let whole = p.evaluate(doc);
    let mut parts = spanclean::automata::SpanRelation::new(vec!["D".into()]);
    for leaf in p.leaves() {
        parts = parts.union(&spanclean::automata::match_all(&leaf.automaton, doc).unwrap());
    }
    assert_eq!(whole, parts);
    assert_eq!(whole.len(), 3);
}

#[test]
fn declared_alphabet_conflicts_with_request() {
    let src = "alphabet \"ab\"; let A = ⟦x{a}⟧; output A;";
    let err = SpannerProgram::parse_with_alphabet(src, "t", None, spanclean::Alphabet::printable()).unwrap_err();
    assert!(err.to_string().contains("conflicts"));
}
