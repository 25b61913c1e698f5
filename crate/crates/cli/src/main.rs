//! `spanclean` command-line front end: verify, extract, clean and
//! gen-corpus. Every command writes its results into `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spanclean::algebra::{ProgramError, SpannerProgram};
use spanclean::cleaner::{
    apply_rule, extract_table, gen_synthetic_corpus, ingest_corpus, round_trip_check, translate_updates,
    update_model, Authorization, CleanError, CleaningRule, CorpusFormat, DocumentStore, RuleFunction,
};
use spanclean::verifier::{verify_stability, UpdateModel, VerificationReport, VerifyError};
use spanclean::Alphabet;
use thiserror::Error;

const VERIFICATION_FILE: &str = "verification.json";

#[derive(Parser)]
#[command(name = "spanclean", version, about = "Verify extraction programs and clean documents through their extracted views")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a program is stable under its update model.
    Verify(VerifyArgs),
    /// Run a program over a corpus and write the extracted table.
    Extract(ExtractArgs),
    /// Extract, apply cleaning rules, translate updates back into the
    /// documents and check the round trip.
    Clean(CleanArgs),
    /// Write a seeded synthetic corpus.
    GenCorpus(GenArgs),
}

#[derive(Args)]
struct ProgramArgs {
    #[arg(long)]
    program: PathBuf,
    /// `printable`, or `chars:<list>` with `\n` for a line break. A
    /// program that declares its own alphabet must agree.
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "xml-records")]
    format: CorpusFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    program: ProgramArgs,
    /// Cleaning rules `VAR=mapping.tsv` or `VAR=normalize:<name>`; without
    /// rules every update variable may change arbitrarily within its domain.
    #[arg(long)]
    rules: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CleanArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, required = true)]
    rules: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// Translate updates even if the program was not verified stable.
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value = "xml-records")]
    format: CorpusFormat,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Clean(#[from] CleanError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    /// Translation refused; a verification outcome rather than a usage error.
    #[error("{0}")]
    Refused(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Refused(_) | CliError::Clean(CleanError::NotVerified) => 1,
            _ => 2,
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn parse_alphabet(spec: &str) -> Result<Alphabet, CliError> {
    if spec == "printable" {
        return Ok(Alphabet::printable());
    }
    let chars = spec
        .strip_prefix("chars:")
        .ok_or_else(|| CliError::Usage(format!("bad --alphabet `{spec}` (expected printable or chars:<list>)")))?;
    let chars = chars.replace("\\n", "\n");
    if !chars.is_ascii() {
        return Err(CliError::Usage("alphabet must be ASCII".into()));
    }
    Ok(Alphabet::from_chars(&chars))
}

fn load_program(args: &ProgramArgs) -> Result<SpannerProgram, CliError> {
    let alphabet = args.alphabet.as_deref().map(parse_alphabet).transpose()?;
    Ok(SpannerProgram::from_file_with(&args.program, alphabet)?)
}

fn load_rules(specs: &[String]) -> Result<Vec<CleaningRule>, CliError> {
    Ok(specs.iter().map(|s| CleaningRule::parse(s, None)).collect::<Result<_, _>>()?)
}

fn model_for(p: &SpannerProgram, rules: &[CleaningRule]) -> UpdateModel {
    if rules.is_empty() {
        UpdateModel::unrestricted(p)
    } else {
        update_model(p, rules)
    }
}

/// Hash of the program text, its includes and the rules, so `clean` can
/// tell whether a stored verification applies to its inputs.
fn fingerprint(p: &SpannerProgram, rules: &[CleaningRule]) -> String {
    let mut h = Sha256::new();
    for src in p.sources() {
        h.update((src.len() as u64).to_le_bytes());
        h.update(src.as_bytes());
    }
    for r in rules {
        h.update(r.name.as_bytes());
        h.update(b"\0");
        if let RuleFunction::Mapping(m) = &r.function {
            for (old, new) in m {
                h.update(old.as_bytes());
                h.update(b"\t");
                h.update(new.as_bytes());
                h.update(b"\n");
            }
        }
    }
    hex::encode(h.finalize())
}

#[derive(Serialize)]
struct VerificationFile<'a> {
    fingerprint: String,
    rules: Vec<&'a str>,
    report: &'a VerificationReport,
}

/// The fields `clean` reads back.
#[derive(Deserialize)]
struct StoredVerification {
    fingerprint: String,
    report: StoredReport,
}

#[derive(Deserialize)]
struct StoredReport {
    stable: bool,
}

fn create_out(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io { path: out.to_path_buf(), message: e.to_string() })
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let p = load_program(&args.program)?;
    let rules = load_rules(&args.rules)?;
    let report = verify_stability(&p, &model_for(&p, &rules))?;
    create_out(&args.out)?;
    let file = VerificationFile {
        fingerprint: fingerprint(&p, &rules),
        rules: rules.iter().map(|r| r.name.as_str()).collect(),
        report: &report,
    };
    write(&args.out.join(VERIFICATION_FILE), &to_json(&file))?;
    let text = report.to_text();
    if let ReportFormat::Text = args.report {
        write(&args.out.join("verification.txt"), &text)?;
    }
    print!("{}", text.lines().next().map(|l| format!("{l}\n")).unwrap_or_default());
    Ok(if report.stable { 0 } else { 1 })
}

fn load_corpus(args: &CorpusArgs, p: &SpannerProgram, out: &Path) -> Result<DocumentStore, CliError> {
    let (store, warnings) = ingest_corpus(&args.corpus, args.format, p.alphabet())?;
    if !warnings.is_empty() {
        let text: String = warnings.iter().map(|w| format!("{w}\n")).collect();
        eprint!("{text}");
        write(&out.join("warnings.txt"), &text)?;
    }
    Ok(store)
}

fn cmd_extract(args: &ExtractArgs) -> Result<u8, CliError> {
    let p = load_program(&args.program)?;
    create_out(&args.out)?;
    let store = load_corpus(&args.corpus, &p, &args.out)?;
    let table = extract_table(&p, &store);
    write(&args.out.join("table.tsv"), &table.to_tsv())?;
    write(&args.out.join("strings.tsv"), &table.strings_tsv())?;
    println!("{} rows from {} of {} documents", table.rows.len(), table.matched_documents(), store.len());
    Ok(0)
}

fn cmd_clean(args: &CleanArgs) -> Result<u8, CliError> {
    let p = load_program(&args.program)?;
    let rules = load_rules(&args.rules)?;
    let report = verify_stability(&p, &model_for(&p, &rules))?;
    if !args.force {
        let path = args.out.join(VERIFICATION_FILE);
        let stored = fs::read_to_string(&path).map_err(|_| {
            CliError::Refused(format!("no verification at {}; run verify with the same rules or pass --force", path.display()))
        })?;
        let stored: StoredVerification = serde_json::from_str(&stored)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if stored.fingerprint != fingerprint(&p, &rules) {
            return Err(CliError::Refused(
                "stored verification is for a different program or rule set; run verify again or pass --force".into(),
            ));
        }
        if !stored.report.stable || !report.stable {
            return Err(CliError::Refused("program is not verified stable; pass --force to translate anyway".into()));
        }
    }
    create_out(&args.out)?;
    let store = load_corpus(&args.corpus, &p, &args.out)?;
    let before = extract_table(&p, &store);
    write(&args.out.join("table.tsv"), &before.to_tsv())?;

    let mut updates = Vec::new();
    for r in &rules {
        updates.extend(apply_rule(&p, &before, r)?);
    }
    write(&args.out.join("updates.json"), &to_json(&updates))?;

    let auth = if args.force { Authorization::Forced } else { Authorization::Verified(&report) };
    let after = translate_updates(&store, &before, &updates, auth)?;
    let cleaned = args.out.join("cleaned");
    match args.corpus.format {
        CorpusFormat::XmlRecords => {
            create_out(&cleaned)?;
            write(&cleaned.join("corpus.xml"), &after.to_xml_records())?;
        }
        CorpusFormat::PlainDir => after.save_dir(&cleaned)?,
    }
    write(&args.out.join("table_after.tsv"), &extract_table(&p, &after).to_tsv())?;

    let rt = round_trip_check(&p, &before, &after, &updates);
    write(&args.out.join("roundtrip.json"), &to_json(&rt))?;
    if let ReportFormat::Text = args.report {
        write(&args.out.join("roundtrip.txt"), &rt.to_text())?;
    }
    print!("{} updates; {}", updates.len(), rt.to_text().lines().next().map(|l| format!("{l}\n")).unwrap_or_default());
    Ok(if rt.exact() { 0 } else { 1 })
}

fn cmd_gen_corpus(args: &GenArgs) -> Result<u8, CliError> {
    let store = gen_synthetic_corpus(args.seed, args.count);
    create_out(&args.out)?;
    match args.format {
        CorpusFormat::XmlRecords => write(&args.out.join("corpus.xml"), &store.to_xml_records())?,
        CorpusFormat::PlainDir => store.save_dir(&args.out)?,
    }
    println!("{} records", store.len());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Extract(a) => cmd_extract(a),
        Command::Clean(a) => cmd_clean(a),
        Command::GenCorpus(a) => cmd_gen_corpus(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
