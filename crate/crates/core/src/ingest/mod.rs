//! Parse contribution documents into a normalized section tree.
//!
//! Supported inputs: OOXML `.docx` (zip + `word/document.xml`), `.md` with
//! `#`-prefix headings, and `.txt` as a single root section. The tree is the
//! same for all formats: an implicit level-0 root holds any preamble text;
//! styled/`#` headings open sections at their level.

mod docx;
mod text;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use docx::parse_docx;
pub use text::{parse_markdown, parse_plaintext, TextFormat};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input is not a zip archive: {0}")]
    NotAZip(String),
    #[error("archive is missing word/document.xml")]
    MissingDocumentPart,
    #[error("malformed XML at byte offset {offset}: {message}")]
    MalformedXml { offset: u64, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported file extension: {0}")]
    UnsupportedExtension(String),
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<IngestError>,
    },
    #[error("malformed corpus manifest: {0}")]
    BadManifest(String),
    #[error("duplicate document id in corpus: {0}")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Docx,
    Markdown,
    Plaintext,
}

/// One node of the heading tree. The implicit root has level 0 and an empty
/// heading; every other node was opened by a heading paragraph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub level: usize,
    pub paragraphs: Vec<String>,
    pub children: Vec<Section>,
    /// Images are skipped during parsing; only their count is kept.
    pub image_count: usize,
}

impl Section {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// All paragraph text of this subtree, own paragraphs first.
    pub fn all_paragraphs(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.paragraphs.iter().map(String::as_str).collect();
        for child in &self.children {
            out.extend(child.all_paragraphs());
        }
        out
    }

    /// Own paragraphs joined with single spaces.
    pub fn body_text(&self) -> String {
        self.paragraphs.join(" ")
    }
}

/// A parsed contribution document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Stable identifier, normally the filename stem.
    pub id: String,
    /// Contributor name, from the manifest or the filename prefix.
    pub company: String,
    pub title: String,
    pub source_format: SourceFormat,
    /// Implicit level-0 root; headed sections are its descendants.
    pub root: Section,
}

impl Document {
    pub fn new(source_format: SourceFormat) -> Self {
        Document {
            id: String::new(),
            company: String::new(),
            title: String::new(),
            source_format,
            root: Section::default(),
        }
    }

    /// Top-level headed sections, in source order.
    pub fn top_sections(&self) -> &[Section] {
        &self.root.children
    }

    /// Every paragraph of the body, in source order (root preamble first).
    pub fn body_paragraphs(&self) -> Vec<&str> {
        self.root.all_paragraphs()
    }
}

/// Leaf sections in document order. The implicit root is included only when
/// it has paragraphs and no children (i.e. an unheaded document).
pub fn leaf_sections(doc: &Document) -> Vec<&Section> {
    leaf_sections_with_paths(doc)
        .into_iter()
        .map(|(_, s)| s)
        .collect()
}

/// Leaf sections paired with their tree path ("" for the root, "1/0" for the
/// first child of the second top-level section).
pub fn leaf_sections_with_paths(doc: &Document) -> Vec<(String, &Section)> {
    fn walk<'a>(section: &'a Section, path: String, out: &mut Vec<(String, &'a Section)>) {
        if section.is_leaf() {
            out.push((path, section));
        } else {
            for (i, child) in section.children.iter().enumerate() {
                let child_path = if path.is_empty() {
                    i.to_string()
                } else {
                    format!("{path}/{i}")
                };
                walk(child, child_path, out);
            }
        }
    }

    let mut out = Vec::new();
    if doc.root.is_leaf() {
        if !doc.root.paragraphs.is_empty() {
            out.push((String::new(), &doc.root));
        }
    } else {
        for (i, child) in doc.root.children.iter().enumerate() {
            walk(child, i.to_string(), &mut out);
        }
    }
    out
}

/// Resolve a tree path produced by [`leaf_sections_with_paths`].
pub fn section_at_path<'a>(doc: &'a Document, path: &str) -> Option<&'a Section> {
    if path.is_empty() {
        return Some(&doc.root);
    }
    let mut current = &doc.root;
    for part in path.split('/') {
        let idx: usize = part.parse().ok()?;
        current = current.children.get(idx)?;
    }
    Some(current)
}

/// Attach a heading paragraph stream to a tree. Shared by the docx and
/// markdown parsers: both reduce their input to (level, heading) events and
/// plain paragraphs.
pub(crate) struct TreeBuilder {
    root: Section,
    /// Index path of the currently open section.
    stack: Vec<usize>,
}

impl TreeBuilder {
    pub(crate) fn new() -> Self {
        TreeBuilder {
            root: Section::default(),
            stack: Vec::new(),
        }
    }

    fn current(&mut self) -> &mut Section {
        let mut node = &mut self.root;
        for &idx in &self.stack {
            node = &mut node.children[idx];
        }
        node
    }

    pub(crate) fn open_heading(&mut self, level: usize, heading: String) {
        // Pop until the parent is strictly shallower.
        while !self.stack.is_empty() && self.current_level() >= level {
            self.stack.pop();
        }
        let parent = self.current();
        parent.children.push(Section {
            heading,
            level,
            ..Section::default()
        });
        let idx = parent.children.len() - 1;
        self.stack.push(idx);
    }

    fn current_level(&mut self) -> usize {
        self.current().level
    }

    pub(crate) fn push_paragraph(&mut self, text: String) {
        if !text.is_empty() {
            self.current().paragraphs.push(text);
        }
    }

    pub(crate) fn count_image(&mut self) {
        self.current().image_count += 1;
    }

    pub(crate) fn finish(self) -> Section {
        self.root
    }
}

/// One corpus manifest row. Unknown roles are kept verbatim; documents with
/// role "chair" are excluded from the analysis corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub company: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

/// A document plus its manifest role, ready for analysis.
#[derive(Debug, Clone)]
pub struct CorpusDocument {
    pub document: Document,
    pub role: Option<String>,
}

impl CorpusDocument {
    pub fn is_chair(&self) -> bool {
        self.role.as_deref() == Some("chair")
    }
}

fn filename_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Company fallback: the filename prefix before the first underscore.
fn company_from_filename(path: &Path) -> String {
    let stem = filename_stem(path);
    match stem.split_once('_') {
        Some((prefix, _)) => prefix.to_string(),
        None => stem,
    }
}

/// Parse one file by extension and fill in identity fields. Parse failures
/// name the offending file.
pub fn load_document(path: &Path) -> Result<Document, IngestError> {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    let mut doc = match ext.as_str() {
        "docx" => {
            let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            parse_docx(&bytes).map_err(|source| IngestError::InFile {
                path: path.to_path_buf(),
                source: Box::new(source),
            })?
        }
        "md" | "markdown" => {
            let text = read_text(path)?;
            parse_plaintext(&text, TextFormat::Markdown)
        }
        "txt" => {
            let text = read_text(path)?;
            parse_plaintext(&text, TextFormat::Plaintext)
        }
        other => return Err(IngestError::UnsupportedExtension(other.to_string())),
    };
    doc.id = filename_stem(path);
    doc.company = company_from_filename(path);
    Ok(doc)
}

fn read_text(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load every supported document in a directory (sorted by filename), or the
/// documents listed in a manifest when `input` is a JSON file.
pub fn load_corpus(input: &Path) -> Result<Vec<CorpusDocument>, IngestError> {
    let docs = if input.is_file() && input.extension().map(|e| e == "json").unwrap_or(false) {
        load_from_manifest(input)?
    } else {
        load_from_directory(input)?
    };
    let mut seen = BTreeSet::new();
    for doc in &docs {
        if !seen.insert(doc.document.id.clone()) {
            return Err(IngestError::DuplicateId(doc.document.id.clone()));
        }
    }
    Ok(docs)
}

fn load_from_directory(dir: &Path) -> Result<Vec<CorpusDocument>, IngestError> {
    let entries = std::fs::read_dir(dir).map_err(|source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().map(|e| e.to_string_lossy().to_lowercase()).as_deref(),
                Some("docx") | Some("md") | Some("markdown") | Some("txt")
            )
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            Ok(CorpusDocument {
                document: load_document(p)?,
                role: None,
            })
        })
        .collect()
}

fn load_from_manifest(manifest_path: &Path) -> Result<Vec<CorpusDocument>, IngestError> {
    let text = read_text(manifest_path)?;
    let entries: Vec<ManifestEntry> =
        serde_json::from_str(&text).map_err(|e| IngestError::BadManifest(e.to_string()))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    entries
        .into_iter()
        .map(|entry| {
            let path = base.join(&entry.path);
            let mut document = load_document(&path)?;
            if let Some(company) = entry.company {
                document.company = company;
            }
            Ok(CorpusDocument {
                document,
                role: entry.role,
            })
        })
        .collect()
}
