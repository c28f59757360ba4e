//! Markdown and plaintext ingestion with the same section-tree contract as
//! the docx parser. Used for text fixtures and `.md`/`.txt` inputs.

use super::{Document, SourceFormat, TreeBuilder};
use crate::textproc::normalize_whitespace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextFormat {
    Markdown,
    Plaintext,
}

/// Parse `#`-heading markdown or plain text. Any input is accepted;
/// plaintext becomes a single root section.
pub fn parse_plaintext(text: &str, format: TextFormat) -> Document {
    match format {
        TextFormat::Markdown => parse_markdown(text),
        TextFormat::Plaintext => {
            let mut doc = Document::new(SourceFormat::Plaintext);
            doc.root.paragraphs = paragraphs_of(text);
            doc
        }
    }
}

pub fn parse_markdown(text: &str) -> Document {
    let mut doc = Document::new(SourceFormat::Markdown);
    let mut tree = TreeBuilder::new();
    let mut buffer: Vec<&str> = Vec::new();

    let flush = |tree: &mut TreeBuilder, buffer: &mut Vec<&str>| {
        if !buffer.is_empty() {
            tree.push_paragraph(normalize_whitespace(&buffer.join(" ")));
            buffer.clear();
        }
    };

    for line in text.lines() {
        if let Some((level, heading)) = heading_line(line) {
            flush(&mut tree, &mut buffer);
            tree.open_heading(level, heading);
        } else if line.trim().is_empty() {
            flush(&mut tree, &mut buffer);
        } else {
            buffer.push(line);
        }
    }
    flush(&mut tree, &mut buffer);
    doc.root = tree.finish();
    doc
}

fn heading_line(line: &str) -> Option<(usize, String)> {
    let hashes = line.chars().take_while(|&c| c == '#').count();
    if hashes == 0 || hashes > 9 {
        return None;
    }
    let rest = &line[hashes..];
    if !rest.starts_with(' ') && !rest.is_empty() {
        return None;
    }
    Some((hashes, normalize_whitespace(rest)))
}

fn paragraphs_of(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut buffer: Vec<&str> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !buffer.is_empty() {
                out.push(normalize_whitespace(&buffer.join(" ")));
                buffer.clear();
            }
        } else {
            buffer.push(line);
        }
    }
    if !buffer.is_empty() {
        out.push(normalize_whitespace(&buffer.join(" ")));
    }
    out
}
