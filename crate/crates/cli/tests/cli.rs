use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn program(name: &str) -> String {
    root().join("programs").join(format!("{name}.prog")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spanclean")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn gen_corpus(dir: &Path, seed: &str, count: &str) -> String {
    let out = run(&["gen-corpus", "--seed", seed, "--count", count, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    dir.join("corpus.xml").display().to_string()
}

fn check_golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("SPANCLEAN_BLESS").is_some_and(|v| !v.is_empty()) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    assert_eq!(actual, read(&path), "golden {name}");
}

#[test]
fn verify_stable_program() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("v");
    let out = run(&["verify", "--program", &program("date"), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "program E_date: stable\n");
    assert!(read(&out_dir.join("verification.txt")).starts_with("program E_date: stable"));
    let json: serde_json::Value = serde_json::from_str(&read(&out_dir.join("verification.json"))).unwrap();
    assert_eq!(json["report"]["stable"], true);
    assert_eq!(json["fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_unstable_program() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--program", &program("order"), "--out", dir.path().to_str().unwrap(), "--report", "json"]);
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("verification.txt").exists());
    let json: serde_json::Value = serde_json::from_str(&read(&dir.path().join("verification.json"))).unwrap();
    assert_eq!(json["report"]["non_expanding"]["verdict"], "fail");
    assert_eq!(json["report"]["conflict_free"]["verdict"], "pass");
}

#[test]
fn malformed_program_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.prog");
    fs::write(&bad, "let E = ⟦Σ* x{a} Σ*;\noutput E;\n").unwrap();
    let out = run(&["verify", "--program", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.prog:1:"), "{err}");

    let out = run(&["verify", "--out", "x"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn alphabet_conflict_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("p.prog");
    fs::write(&prog, "alphabet printable;\nlet E = ⟦Σ* x{a} Σ*⟧;\noutput E;\n").unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let ok = run(&["verify", "--program", prog.to_str().unwrap(), "--alphabet", "printable", "--out", out_dir]);
    assert_eq!(code(&ok), 0);
    let clash = run(&["verify", "--program", prog.to_str().unwrap(), "--alphabet", "chars:ab", "--out", out_dir]);
    assert_eq!(code(&clash), 2);
    assert!(String::from_utf8_lossy(&clash.stderr).contains("alphabet"));
}

#[test]
fn extract_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty");
    fs::create_dir(&corpus).unwrap();
    let out_dir = dir.path().join("x");
    let out = run(&[
        "extract",
        "--program",
        &program("date"),
        "--corpus",
        corpus.to_str().unwrap(),
        "--format",
        "plain-dir",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(read(&out_dir.join("table.tsv")), "doc_id\tD\n");
    assert_eq!(read(&out_dir.join("strings.tsv")), "doc_id\tD\n");
}

#[test]
fn gen_corpus_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen_corpus(&dir.path().join("a"), "5", "12");
    let b = gen_corpus(&dir.path().join("b"), "5", "12");
    assert_eq!(read(Path::new(&a)), read(Path::new(&b)));
    assert_eq!(read(Path::new(&a)).matches("<RECORD ID=").count(), 12);
}

#[test]
fn clean_requires_verification() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus(&dir.path().join("c"), "1", "5");
    let out_dir = dir.path().join("run");
    let clean = |rules: &str| {
        run(&[
            "clean",
            "--program",
            &program("date"),
            "--corpus",
            &corpus,
            "--rules",
            rules,
            "--out",
            out_dir.to_str().unwrap(),
        ])
    };
    let refused = clean("D=normalize:iso-date");
    assert_eq!(code(&refused), 1);
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    assert!(!out_dir.join("updates.json").exists());

    let v = run(&["verify", "--program", &program("date"), "--rules", "D=normalize:iso-date", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    // A verification for other rules does not count.
    let ages = format!("D={}", root().join("rules/ages.tsv").display());
    assert_eq!(code(&clean(&ages)), 1);
    assert_eq!(code(&clean("D=normalize:iso-date")), 0);
}

#[test]
fn clean_unverified_with_force() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus(&dir.path().join("c"), "2", "10");
    let out_dir = dir.path().join("run");
    let out = run(&[
        "clean",
        "--program",
        &program("order"),
        "--corpus",
        &corpus,
        "--rules",
        "D2=normalize:iso-date",
        "--force",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read(&out_dir.join("roundtrip.txt")).starts_with("exact match"));
}

#[test]
fn clean_date_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = gen_corpus(&dir.path().join("c"), "7", "20");
    let out_dir = dir.path().join("run");
    let out_str = out_dir.to_str().unwrap();
    let rules = "D=normalize:iso-date";
    assert_eq!(code(&run(&["verify", "--program", &program("date"), "--rules", rules, "--out", out_str])), 0);
    let out = run(&["clean", "--program", &program("date"), "--corpus", &corpus, "--rules", rules, "--out", out_str]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(&out_dir.join("roundtrip.txt"));
    assert!(report.starts_with("exact match"));
    check_golden("date_roundtrip.txt", &report);
    check_golden("date_updates.json", &read(&out_dir.join("updates.json")));
    check_golden("date_table_after.tsv", &read(&out_dir.join("table_after.tsv")));
    let rt: serde_json::Value = serde_json::from_str(&read(&out_dir.join("roundtrip.json"))).unwrap();
    assert_eq!(rt["diffs"].as_array().unwrap().len(), 0);

    // Cleaning the cleaned corpus again proposes nothing.
    let again_dir = dir.path().join("again");
    let again = again_dir.to_str().unwrap();
    assert_eq!(code(&run(&["verify", "--program", &program("date"), "--rules", rules, "--out", again])), 0);
    let cleaned = out_dir.join("cleaned/corpus.xml");
    let out = run(&["clean", "--program", &program("date"), "--corpus", cleaned.to_str().unwrap(), "--rules", rules, "--out", again]);
    assert_eq!(code(&out), 0);
    assert_eq!(read(&again_dir.join("updates.json")), "[]\n");
    assert_eq!(read(&again_dir.join("cleaned/corpus.xml")), read(&cleaned));
}
