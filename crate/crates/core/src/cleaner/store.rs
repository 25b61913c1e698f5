use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::CleanError;
use crate::automata::Document;
use crate::charset::Alphabet;

/// Documents by id, in insertion order, with a version tag that every
/// translation step increments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DocumentStore {
    documents: Vec<Document>,
    index: BTreeMap<String, usize>,
    pub origin: Option<PathBuf>,
    pub version: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One file of `<RECORD ID="n">` blocks; the id is the record id.
    XmlRecords,
    /// A directory with one document per file; the id is the file stem.
    PlainDir,
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "xml-records" => Ok(CorpusFormat::XmlRecords),
            "plain-dir" => Ok(CorpusFormat::PlainDir),
            other => Err(format!("unknown corpus format `{other}` (expected xml-records or plain-dir)")),
        }
    }
}

/// A document left out of the store because of a character outside Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngestWarning {
    pub id: String,
    /// 1-based offset of the first foreign character.
    pub offset: usize,
    pub character: char,
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "document {} skipped: {:?} at offset {} is outside the alphabet", self.id, self.character, self.offset)
    }
}

impl DocumentStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, doc: Document) -> Result<(), CleanError> {
        if self.index.contains_key(&doc.id) {
            return Err(CleanError::DuplicateId(doc.id));
        }
        self.index.insert(doc.id.clone(), self.documents.len());
        self.documents.push(doc);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.index.get(id).map(|&i| &self.documents[i])
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// The next version, with `replace` applied to the named documents.
    pub(crate) fn next_version(&self, replace: BTreeMap<String, String>) -> DocumentStore {
        let mut next = self.clone();
        next.version += 1;
        for (id, text) in replace {
            let i = next.index[&id];
            next.documents[i].text = text;
        }
        next
    }

    /// Writes one `<id>.xml` file per document into `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<(), CleanError> {
        fs::create_dir_all(dir).map_err(|e| CleanError::io(dir, e))?;
        for doc in &self.documents {
            let path = dir.join(format!("{}.xml", doc.id));
            fs::write(&path, &doc.text).map_err(|e| CleanError::io(&path, e))?;
        }
        Ok(())
    }

    /// All documents concatenated, in the xml-records layout.
    pub fn to_xml_records(&self) -> String {
        self.documents.iter().map(|d| d.text.as_str()).collect()
    }
}

/// Loads a corpus; documents with characters outside `alphabet` are
/// skipped and reported.
pub fn ingest_corpus(
    path: &Path,
    format: CorpusFormat,
    alphabet: Alphabet,
) -> Result<(DocumentStore, Vec<IngestWarning>), CleanError> {
    let docs = match format {
        CorpusFormat::XmlRecords => {
            let text = fs::read_to_string(path).map_err(|e| CleanError::io(path, e))?;
            split_records(&text)?
        }
        CorpusFormat::PlainDir => read_dir(path)?,
    };
    let mut store = DocumentStore { origin: Some(path.to_path_buf()), ..Default::default() };
    let mut warnings = Vec::new();
    for doc in docs {
        if let Some((offset, character)) = alphabet.first_foreign(&doc.text) {
            warnings.push(IngestWarning { id: doc.id, offset: offset + 1, character });
            continue;
        }
        store.insert(doc)?;
    }
    Ok((store, warnings))
}

fn read_dir(dir: &Path) -> Result<Vec<Document>, CleanError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CleanError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort_by(|a, b| natural_key(a).cmp(&natural_key(b)));
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(|e| CleanError::io(&p, e))?;
            let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok(Document::new(id, text))
        })
        .collect()
}

/// Numeric stems sort by value, before any other names.
fn natural_key(p: &Path) -> (u8, u64, String) {
    let stem = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    match stem.parse::<u64>() {
        Ok(n) => (0, n, stem),
        Err(_) => (1, 0, stem),
    }
}

const OPEN: &str = "<RECORD ID=\"";
const CLOSE: &str = "</RECORD>";

/// Splits on record boundaries. Each document runs from its `<RECORD`
/// tag through `</RECORD>` and the line break after it.
pub fn split_records(text: &str) -> Result<Vec<Document>, CleanError> {
    let line_of = |pos: usize| text[..pos].matches('\n').count() + 1;
    let mut out = Vec::new();
    let mut pos = 0;
    while let Some(rel) = text[pos..].find("<RECORD") {
        let start = pos + rel;
        let malformed = |message: &str| CleanError::MalformedRecord { line: line_of(start), message: message.into() };
        if !text[start..].starts_with(OPEN) {
            return Err(malformed("expected `<RECORD ID=\"`"));
        }
        let id_start = start + OPEN.len();
        let id_len = text[id_start..].find('"').ok_or_else(|| malformed("unterminated record id"))?;
        let id = &text[id_start..id_start + id_len];
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed("record id must be a number"));
        }
        if !text[id_start + id_len..].starts_with("\">") {
            return Err(malformed("expected `\">` after the record id"));
        }
        let close = text[start..].find(CLOSE).ok_or_else(|| malformed("missing </RECORD>"))?;
        let mut end = start + close + CLOSE.len();
        if text[end..].starts_with('\n') {
            end += 1;
        }
        if out.iter().any(|d: &Document| d.id == id) {
            return Err(CleanError::DuplicateId(id.to_string()));
        }
        out.push(Document::new(id, &text[start..end]));
        pos = end;
    }
    Ok(out)
}
