//! OOXML (`.docx`) ingestion: a zip archive whose `word/document.xml` holds
//! the body as `w:p` paragraphs. Paragraphs styled `Heading1`..`Heading9`
//! open sections; a `Title` style feeds `Document.title`; tables are
//! flattened to tab-separated rows; drawings are only counted.

use std::io::{Cursor, Read};
use std::sync::OnceLock;

use quick_xml::events::Event;
use quick_xml::Reader;
use regex::Regex;

use super::{Document, IngestError, SourceFormat, TreeBuilder};
use crate::textproc::normalize_whitespace;

fn heading_style_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^Heading([1-9])$").expect("heading style regex"))
}

pub fn parse_docx(bytes: &[u8]) -> Result<Document, IngestError> {
    let mut archive = zip::ZipArchive::new(Cursor::new(bytes))
        .map_err(|e| IngestError::NotAZip(e.to_string()))?;
    let mut xml = String::new();
    {
        let mut part = archive
            .by_name("word/document.xml")
            .map_err(|_| IngestError::MissingDocumentPart)?;
        part.read_to_string(&mut xml).map_err(|source| IngestError::Io {
            path: "word/document.xml".into(),
            source,
        })?;
    }
    parse_document_xml(&xml)
}

/// Strip the namespace prefix from a qualified name.
fn local(name: &[u8]) -> &[u8] {
    match name.iter().position(|&b| b == b':') {
        Some(i) => &name[i + 1..],
        None => name,
    }
}

fn parse_document_xml(xml: &str) -> Result<Document, IngestError> {
    let mut reader = Reader::from_str(xml);
    reader.trim_text(false);

    let mut doc = Document::new(SourceFormat::Docx);
    let mut tree = TreeBuilder::new();

    let mut para_text = String::new();
    let mut para_style: Option<String> = None;
    let mut in_text_run = false;

    // Table state: text inside w:tbl is routed into cell buffers and each
    // row becomes one tab-separated paragraph.
    let mut table_depth = 0usize;
    let mut row_cells: Vec<String> = Vec::new();

    loop {
        let event = reader.read_event().map_err(|e| IngestError::MalformedXml {
            offset: reader.buffer_position() as u64,
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) => match local(e.name().as_ref()) {
                b"p" => {
                    if table_depth == 0 {
                        para_text.clear();
                        para_style = None;
                    }
                }
                b"t" => in_text_run = true,
                b"tbl" => {
                    table_depth += 1;
                }
                b"tr" if table_depth > 0 => row_cells.clear(),
                b"tc" if table_depth > 0 => row_cells.push(String::new()),
                b"pStyle" if table_depth == 0 => {
                    para_style = attr_val(e, b"val");
                }
                b"drawing" | b"pict" => tree.count_image(),
                _ => {}
            },
            Event::Empty(ref e) => match local(e.name().as_ref()) {
                b"pStyle" if table_depth == 0 => {
                    para_style = attr_val(e, b"val");
                }
                b"drawing" | b"pict" => tree.count_image(),
                b"tab" | b"br" => {
                    if table_depth > 0 {
                        if let Some(cell) = row_cells.last_mut() {
                            cell.push(' ');
                        }
                    } else {
                        para_text.push(' ');
                    }
                }
                _ => {}
            },
            Event::Text(t) => {
                if in_text_run {
                    let text = t.unescape().map_err(|e| IngestError::MalformedXml {
                        offset: reader.buffer_position() as u64,
                        message: e.to_string(),
                    })?;
                    if table_depth > 0 {
                        if let Some(cell) = row_cells.last_mut() {
                            cell.push_str(&text);
                        }
                    } else {
                        para_text.push_str(&text);
                    }
                }
            }
            Event::End(ref e) => match local(e.name().as_ref()) {
                b"t" => in_text_run = false,
                b"p" => {
                    if table_depth == 0 {
                        finish_paragraph(&mut doc, &mut tree, &para_text, para_style.as_deref());
                        para_text.clear();
                        para_style = None;
                    } else if let Some(cell) = row_cells.last_mut() {
                        // Separate stacked cell paragraphs.
                        cell.push(' ');
                    }
                }
                b"tr" if table_depth > 0 => {
                    let row = row_cells
                        .iter()
                        .map(|c| normalize_whitespace(c))
                        .collect::<Vec<_>>()
                        .join("\t");
                    if !row.trim().is_empty() {
                        tree.push_paragraph(row);
                    }
                    row_cells.clear();
                }
                b"tbl" => table_depth = table_depth.saturating_sub(1),
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }

    doc.root = tree.finish();
    Ok(doc)
}

fn finish_paragraph(doc: &mut Document, tree: &mut TreeBuilder, text: &str, style: Option<&str>) {
    let text = normalize_whitespace(text);
    if let Some(style) = style {
        if let Some(caps) = heading_style_re().captures(style) {
            let level: usize = caps[1].parse().expect("single digit");
            tree.open_heading(level, text);
            return;
        }
        if style == "Title" {
            if doc.title.is_empty() {
                doc.title = text;
            }
            return;
        }
    }
    tree.push_paragraph(text);
}

fn attr_val(e: &quick_xml::events::BytesStart<'_>, key: &[u8]) -> Option<String> {
    e.attributes()
        .filter_map(|a| a.ok())
        .find(|a| local(a.key.as_ref()) == key)
        .map(|a| String::from_utf8_lossy(&a.value).into_owned())
}
