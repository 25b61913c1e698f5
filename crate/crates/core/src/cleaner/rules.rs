use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CleanError, ExtractedTable};
use crate::algebra::SpannerProgram;
use crate::automata::{Nfa, Span};
use crate::charset::CharSet;
use crate::regex_cv::char_set;
use crate::verifier::{domains, UpdateFunction, UpdateModel};

/// A single-cell change to the extracted view.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellUpdate {
    pub doc_id: String,
    /// Spans of the whole row before the update; identifies the row.
    pub row: Vec<Span>,
    pub column: String,
    pub old: String,
    pub new: String,
}

impl CellUpdate {
    /// The span of the updated cell.
    pub fn span(&self, table: &ExtractedTable) -> Option<Span> {
        table.column(&self.column).and_then(|i| self.row.get(i).copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalizer {
    /// Dates to `yyyy-mm-dd`.
    IsoDate,
    /// List separators to a line break.
    ListNewline,
    /// Prefixes the unit when the value does not start with one.
    DefaultUnit(String),
    /// Takes the value of another column of the same row.
    CopyFrom(String),
}

const UNITS: [&str; 8] = ["mg", "mcg", "g", "ml", "tsp", "tbsp", "tab", "units"];

impl Normalizer {
    fn apply(&self, value: &str, row: &dyn Fn(&str) -> Option<String>) -> Option<String> {
        match self {
            Normalizer::IsoDate => iso_date(value),
            Normalizer::ListNewline => matches!(value, " , " | " ; ").then(|| "\n".to_string()),
            Normalizer::DefaultUnit(unit) => {
                let first = value.split_whitespace().next().unwrap_or("");
                if UNITS.contains(&first) {
                    None
                } else {
                    Some(format!(" {unit}{value}"))
                }
            }
            Normalizer::CopyFrom(col) => row(col),
        }
    }
}

impl fmt::Display for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalizer::IsoDate => f.write_str("iso-date"),
            Normalizer::ListNewline => f.write_str("list-newline"),
            Normalizer::DefaultUnit(u) => write!(f, "default-unit:{u}"),
            Normalizer::CopyFrom(c) => write!(f, "copy-from:{c}"),
        }
    }
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// `yyyymmdd`, `yyyy?mm?dd` and `mm?dd?yyyy` with `?` in `/-`; other
/// shapes (like five-digit years) are left alone.
pub fn iso_date(value: &str) -> Option<String> {
    let iso = |y: &str, m: &str, d: &str| format!("{y}-{m}-{d}");
    let out = if value.len() == 8 && digits(value) {
        iso(&value[..4], &value[4..6], &value[6..])
    } else {
        let parts: Vec<&str> = value.split(['/', '-']).collect();
        match parts.as_slice() {
            [y, m, d] if y.len() == 4 && m.len() == 2 && d.len() == 2 => iso(y, m, d),
            [m, d, y] if m.len() == 2 && d.len() == 2 && y.len() == 4 => iso(y, m, d),
            _ => return None,
        }
    };
    (out.bytes().filter(u8::is_ascii_digit).count() == 8 && out != value).then_some(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleFunction {
    Mapping(BTreeMap<String, String>),
    Normalizer(Normalizer),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleaningRule {
    pub name: String,
    pub target: String,
    pub function: RuleFunction,
    /// Mapping file the rule was read from.
    pub source: Option<PathBuf>,
}

impl CleaningRule {
    /// Parses `VAR=normalize:<name>` or `VAR=<mapping.tsv>`; relative
    /// mapping paths resolve against `base`.
    pub fn parse(spec: &str, base: Option<&Path>) -> Result<Self, CleanError> {
        let bad = |m: &str| CleanError::RuleSyntax(format!("{spec}: {m}"));
        let (target, what) = spec.split_once('=').ok_or_else(|| bad("expected VAR=..."))?;
        let target = target.trim();
        if target.is_empty() {
            return Err(bad("missing variable"));
        }
        if let Some(norm) = what.strip_prefix("normalize:") {
            let normalizer = match norm.split_once(':') {
                None if norm == "iso-date" => Normalizer::IsoDate,
                None if norm == "list-newline" => Normalizer::ListNewline,
                Some(("default-unit", u)) if !u.is_empty() => Normalizer::DefaultUnit(u.to_string()),
                Some(("copy-from", c)) if !c.is_empty() => Normalizer::CopyFrom(c.to_string()),
                _ => return Err(bad("unknown normalizer")),
            };
            return Ok(CleaningRule {
                name: format!("{target}:{normalizer}"),
                target: target.to_string(),
                function: RuleFunction::Normalizer(normalizer),
                source: None,
            });
        }
        let path = match base {
            Some(b) => b.join(what),
            None => PathBuf::from(what),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| CleanError::io(&path, e))?;
        let mapping = parse_mapping(&text, &path)?;
        Ok(CleaningRule {
            name: format!("{target}:{}", path.file_name().unwrap_or_default().to_string_lossy()),
            target: target.to_string(),
            function: RuleFunction::Mapping(mapping),
            source: Some(path),
        })
    }

    /// The rule as an update function, for verification.
    pub fn update_function(&self, p: &SpannerProgram) -> UpdateFunction {
        let domain_chars = |v: &str| domains(p, v).iter().fold(CharSet::EMPTY, |acc, d| acc.union(char_set(d, p.alphabet())));
        match &self.function {
            RuleFunction::Mapping(m) => UpdateFunction::Mapping(m.clone()),
            RuleFunction::Normalizer(n) => UpdateFunction::Opaque { output_chars: output_chars(n, &self.target, &domain_chars) },
        }
    }
}

/// Characters a normalizer may write.
fn output_chars(n: &Normalizer, target: &str, domain_chars: &dyn Fn(&str) -> CharSet) -> CharSet {
    match n {
        Normalizer::IsoDate => CharSet::range(b'0', b'9').with(b'-'),
        Normalizer::ListNewline => CharSet::singleton(b'\n'),
        Normalizer::DefaultUnit(u) => domain_chars(target).union(CharSet::from_bytes(u.as_bytes())).with(b' '),
        Normalizer::CopyFrom(c) => domain_chars(c),
    }
}

/// Tab-separated `old<TAB>new` lines; `#` starts a comment line.
pub fn parse_mapping(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CleanError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (old, new) = line.split_once('\t').ok_or_else(|| CleanError::RuleFile {
            path: path.to_path_buf(),
            line: n + 1,
            message: "expected old<TAB>new".into(),
        })?;
        out.insert(old.to_string(), new.to_string());
    }
    Ok(out)
}

/// The update model of a rule set: one function per target variable.
pub fn update_model(p: &SpannerProgram, rules: &[CleaningRule]) -> UpdateModel {
    let mut model = UpdateModel::default();
    for r in rules {
        model.functions.insert(r.target.clone(), r.update_function(p));
    }
    model
}

/// Proposes an update for every cell of the target column the rule
/// changes. Fails if a proposed value leaves the column's domain or uses
/// characters the rule does not declare.
pub fn apply_rule(p: &SpannerProgram, table: &ExtractedTable, rule: &CleaningRule) -> Result<Vec<CellUpdate>, CleanError> {
    let col = table
        .column(&rule.target)
        .ok_or_else(|| CleanError::UnknownColumn(rule.target.clone()))?;
    let nfas: Vec<Nfa> = domains(p, &rule.target).iter().filter_map(|d| Nfa::new(d, p.alphabet()).ok()).collect();
    let declared = match rule.update_function(p) {
        UpdateFunction::Opaque { output_chars } => Some(output_chars),
        UpdateFunction::Mapping(_) => None,
    };
    let mut out = Vec::new();
    for row in &table.rows {
        let old = &row.cells[col].value;
        let lookup = |c: &str| table.column(c).map(|i| row.cells[i].value.clone());
        let new = match &rule.function {
            RuleFunction::Mapping(m) => m.get(old).cloned(),
            RuleFunction::Normalizer(n) => n.apply(old, &lookup),
        };
        let Some(new) = new.filter(|n| n != old) else { continue };
        if !nfas.iter().all(|nfa| nfa.accepts(&new)) {
            return Err(CleanError::NotDomainPreserving { rule: rule.name.clone(), old: old.clone(), new });
        }
        if let Some(chars) = declared {
            let used = CharSet::from_bytes(new.as_bytes());
            if !used.is_subset(chars) {
                return Err(CleanError::UndeclaredOutput { rule: rule.name.clone(), value: new, chars: used.minus(chars) });
            }
        }
        out.push(CellUpdate {
            doc_id: row.doc_id.clone(),
            row: row.spans(),
            column: rule.target.clone(),
            old: old.clone(),
            new,
        });
    }
    Ok(out)
}
