//! Sentence segmentation, tokenization, term statistics, and marker detection.
//!
//! Markers are the structured statements inside contributions ("Proposal 1:",
//! "High Priority Proposal 3.1-1a:", "Observation 2:", "Scenario 1:") that
//! carry the actionable content of a document.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::ingest::Section;

const BUNDLED_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// Abbreviations whose trailing period never ends a sentence.
const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "fig.", "figs.", "etc.", "cf.", "vs.", "no.", "al.", "approx.", "resp.",
    "sec.", "ref.", "eq.",
];

/// Lowercased stopword set. `Default` loads the bundled English list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(BUNDLED_STOPWORDS)
    }
}

impl Stopwords {
    /// Parse a stopword file: one term per line, UTF-8, blank lines ignored.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Stopwords(BTreeSet::new())
    }

    pub fn from_terms<I: IntoIterator<Item = S>, S: Into<String>>(terms: I) -> Self {
        Stopwords(terms.into_iter().map(|t| t.into().to_lowercase()).collect())
    }

    /// Extend with additional domain terms (e.g. from a user-supplied file).
    pub fn extend_from(&mut self, text: &str) {
        for line in text.lines() {
            let t = line.trim().to_lowercase();
            if !t.is_empty() {
                self.0.insert(t);
            }
        }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Term frequencies for one text unit. Terms are lowercase and non-empty;
/// the counts sum to `total_tokens`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStats {
    pub term_counts: BTreeMap<String, u64>,
    pub total_tokens: u64,
}

impl TokenStats {
    pub fn is_empty(&self) -> bool {
        self.total_tokens == 0
    }

    /// Distinct terms, in sorted order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_counts.keys().map(String::as_str)
    }

    /// Merge another stats table into this one.
    pub fn absorb(&mut self, other: &TokenStats) {
        for (term, count) in &other.term_counts {
            *self.term_counts.entry(term.clone()).or_insert(0) += count;
        }
        self.total_tokens += other.total_tokens;
    }
}

/// Counts of proposal / observation / scenario statements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerCounts {
    pub proposals: u32,
    pub observations: u32,
    pub scenarios: u32,
}

impl MarkerCounts {
    pub fn total(&self) -> u32 {
        self.proposals + self.observations + self.scenarios
    }

    pub fn add(&mut self, other: MarkerCounts) {
        self.proposals += other.proposals;
        self.observations += other.observations;
        self.scenarios += other.scenarios;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkerKind {
    Proposal,
    Observation,
    Scenario,
}

/// A marker statement together with the paragraph that carries it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerHit {
    pub kind: MarkerKind,
    pub identifier: String,
    pub paragraph: String,
}

/// Split whitespace-normalized text into sentences.
///
/// A boundary is `.`, `!` or `?` followed by whitespace and an uppercase
/// letter or digit. Periods are guarded against abbreviations ("e.g.",
/// "Fig.") and against numbered identifiers ("3.", "3.1.") that continue
/// with another digit, as in enumerated proposal labels.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let c = chars[i];
        if c == '.' || c == '!' || c == '?' {
            // Next non-candidate char must be whitespace, then uppercase/digit.
            let mut j = i + 1;
            let mut saw_ws = false;
            while j < chars.len() && chars[j].is_whitespace() {
                saw_ws = true;
                j += 1;
            }
            let next_ok = saw_ws
                && j < chars.len()
                && (chars[j].is_uppercase() || chars[j].is_ascii_digit());
            if next_ok && (c != '.' || !period_guarded(&chars, i, chars[j])) {
                let sentence: String = chars[start..=i].iter().collect();
                let sentence = sentence.trim().to_string();
                if !sentence.is_empty() {
                    sentences.push(sentence);
                }
                start = j;
                i = j;
                continue;
            }
        }
        i += 1;
    }

    let tail: String = chars[start..].iter().collect();
    let tail = tail.trim().to_string();
    if !tail.is_empty() {
        sentences.push(tail);
    }
    sentences
}

/// True when the period at `chars[dot]` belongs to an abbreviation or to a
/// numbered identifier continued by a digit, and must not split.
fn period_guarded(chars: &[char], dot: usize, next_char: char) -> bool {
    let mut w = dot;
    while w > 0 && !chars[w - 1].is_whitespace() {
        w -= 1;
    }
    let word: String = chars[w..=dot].iter().collect::<String>().to_lowercase();

    if ABBREVIATIONS.contains(&word.as_str()) {
        return true;
    }
    // "3." or "3.1." followed by another digit reads as an identifier, not an end.
    if next_char.is_ascii_digit() {
        let body = &word[..word.len() - 1];
        if !body.is_empty() && body.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit())) {
            return true;
        }
    }
    false
}

/// Lowercase and count maximal alphanumeric runs, dropping stopwords and
/// single-character tokens. "20MHz" stays one token ("20mhz").
pub fn tokenize(text: &str, stopwords: &Stopwords) -> TokenStats {
    let mut stats = TokenStats::default();
    let mut current = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            let term = std::mem::take(&mut current);
            if term.chars().count() > 1 && !stopwords.contains(&term) {
                *stats.term_counts.entry(term).or_insert(0) += 1;
                stats.total_tokens += 1;
            }
        }
    }
    stats
}

fn marker_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        // Up to 3 qualifier words, then the keyword, then a numeric identifier
        // (number, dotted number, or number-letter like 3.1-1a), optional colon.
        Regex::new(
            r"(?i)^\s*(?:[[:alpha:]][[:alpha:]-]*\s+){0,3}(proposal|observation|scenario)\s+(\d+(?:\.\d+)*(?:-\d+)?[[:alpha:]]?)\s*(?::|\b)",
        )
        .expect("marker regex compiles")
    })
}

/// Count marker statements heading the section's own paragraphs.
pub fn detect_markers(section: &Section) -> MarkerCounts {
    let mut counts = MarkerCounts::default();
    for hit in find_markers(section) {
        match hit.kind {
            MarkerKind::Proposal => counts.proposals += 1,
            MarkerKind::Observation => counts.observations += 1,
            MarkerKind::Scenario => counts.scenarios += 1,
        }
    }
    counts
}

/// Like [`detect_markers`] but keeps the matched paragraphs, so reports can
/// list the statements rather than just tally them.
pub fn find_markers(section: &Section) -> Vec<MarkerHit> {
    let re = marker_regex();
    let mut hits = Vec::new();
    for paragraph in &section.paragraphs {
        if let Some(caps) = re.captures(paragraph) {
            let kind = match caps[1].to_lowercase().as_str() {
                "proposal" => MarkerKind::Proposal,
                "observation" => MarkerKind::Observation,
                _ => MarkerKind::Scenario,
            };
            hits.push(MarkerHit {
                kind,
                identifier: caps[2].to_string(),
                paragraph: paragraph.clone(),
            });
        }
    }
    hits
}

/// Collapse whitespace runs (including non-breaking spaces) to single spaces.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_ws = false;
    for c in text.chars() {
        if c.is_whitespace() || c == '\u{00A0}' {
            in_ws = true;
        } else {
            if in_ws && !out.is_empty() {
                out.push(' ');
            }
            in_ws = false;
            out.push(c);
        }
    }
    out
}
