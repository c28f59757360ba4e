//! Per-section summaries: an extractive graph-centrality baseline plus a
//! remote abstractive protocol, both annotated with marker counts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Section;
use crate::similarity::PairRef;
use crate::textproc::{detect_markers, split_sentences, tokenize, MarkerCounts, Stopwords};

#[derive(Debug, Error)]
pub enum SummarizeError {
    #[error("section has no sentences")]
    NoSentences,
    #[error("cannot summarize empty text")]
    EmptyText,
}

const DAMPING: f64 = 0.85;
const TOLERANCE: f64 = 1e-6;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryMethod {
    Extractive,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub section_ref: PairRef,
    pub heading: String,
    pub summary_text: String,
    pub method: SummaryMethod,
    pub markers: MarkerCounts,
    pub sentence_count_original: usize,
    pub sentence_count_summary: usize,
}

/// Sentence centrality scores from damped power iteration over a token
/// overlap graph. The edge weight between two sentences is the size of
/// their token intersection, discounted by the log of their lengths;
/// sentences with fewer than two distinct tokens stay disconnected.
/// Scores are a probability distribution (non-negative, sum 1).
pub fn textrank_scores(
    sentences: &[String],
    stopwords: &Stopwords,
) -> Result<Vec<f64>, SummarizeError> {
    let n = sentences.len();
    if n == 0 {
        return Err(SummarizeError::NoSentences);
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }

    let token_sets: Vec<BTreeSet<String>> = sentences
        .iter()
        .map(|s| tokenize(s, stopwords).term_counts.into_keys().collect())
        .collect();

    let mut weights = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if token_sets[i].len() < 2 || token_sets[j].len() < 2 {
                continue;
            }
            let overlap = token_sets[i].intersection(&token_sets[j]).count() as f64;
            if overlap > 0.0 {
                let w = overlap
                    / ((1.0 + token_sets[i].len() as f64).ln()
                        + (1.0 + token_sets[j].len() as f64).ln());
                weights[i][j] = w;
                weights[j][i] = w;
            }
        }
    }

    // Row-normalize; rows without edges stay zero and keep only the
    // uniform damping term.
    let row_sums: Vec<f64> = weights.iter().map(|row| row.iter().sum()).collect();
    let uniform = 1.0 / n as f64;
    let mut scores = vec![uniform; n];
    let teleport = (1.0 - DAMPING) * uniform;

    for _ in 0..MAX_ITERATIONS {
        let mut next = vec![teleport; n];
        for i in 0..n {
            if row_sums[i] == 0.0 {
                continue;
            }
            let contribution = DAMPING * scores[i] / row_sums[i];
            for j in 0..n {
                if weights[i][j] > 0.0 {
                    next[j] += contribution * weights[i][j];
                }
            }
        }
        let delta: f64 = next
            .iter()
            .zip(&scores)
            .map(|(a, b)| (a - b).abs())
            .sum();
        scores = next;
        if delta < TOLERANCE {
            break;
        }
    }

    let total: f64 = scores.iter().sum();
    for s in &mut scores {
        *s /= total;
    }
    Ok(scores)
}

/// Select the top-k sentences by centrality, where
/// k = clamp(ceil(min_ratio * n), 1, max_sentences). Ties break toward the
/// earlier sentence; output preserves the original order.
pub fn extractive_summary(
    section_ref: PairRef,
    section: &Section,
    max_sentences: usize,
    min_ratio: f64,
    stopwords: &Stopwords,
) -> Result<SummaryRecord, SummarizeError> {
    assert!(max_sentences >= 1, "max_sentences must be at least 1");
    let sentences = section_sentences(section);
    let n = sentences.len();
    if n == 0 {
        return Err(SummarizeError::NoSentences);
    }
    let scores = textrank_scores(&sentences, stopwords)?;

    let k = ((min_ratio * n as f64).ceil() as usize).clamp(1, max_sentences);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    let mut selected: Vec<usize> = order.into_iter().take(k).collect();
    selected.sort_unstable();

    let summary_text = selected
        .iter()
        .map(|&i| sentences[i].as_str())
        .collect::<Vec<_>>()
        .join(" ");

    Ok(SummaryRecord {
        section_ref,
        heading: section.heading.clone(),
        summary_text,
        method: SummaryMethod::Extractive,
        markers: detect_markers(section),
        sentence_count_original: n,
        sentence_count_summary: selected.len(),
    })
}

/// All sentences of a section's own paragraphs, in order.
pub fn section_sentences(section: &Section) -> Vec<String> {
    section
        .paragraphs
        .iter()
        .flat_map(|p| split_sentences(p))
        .collect()
}
