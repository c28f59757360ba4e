//! Cosine similarity, the weighted heading/content combination, pairwise
//! rankings at section and document level, and Pearson correlation for
//! evaluation against human scores.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingVector;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("cosine of a zero vector is undefined ({0})")]
    ZeroVector(String),
    #[error("vector dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("no pairs to rank")]
    NoPairs,
    #[error("fewer than 2 complete pairs after dropping missing values")]
    InsufficientData,
    #[error("zero variance on one side; correlation undefined")]
    ZeroVariance,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Identifies one side of a pair: a whole document, or a section within one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairRef {
    pub doc_id: String,
    /// Section tree path; `None` for document-level pairs.
    pub section_path: Option<String>,
}

impl PairRef {
    pub fn document(doc_id: impl Into<String>) -> Self {
        PairRef {
            doc_id: doc_id.into(),
            section_path: None,
        }
    }

    pub fn section(doc_id: impl Into<String>, path: impl Into<String>) -> Self {
        PairRef {
            doc_id: doc_id.into(),
            section_path: Some(path.into()),
        }
    }
}

impl std::fmt::Display for PairRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.section_path {
            Some(path) => write!(f, "{}#{}", self.doc_id, path),
            None => write!(f, "{}", self.doc_id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairLevel {
    Section,
    Document,
}

/// Similarity of one unordered pair; `a < b` under the reference order.
/// `heading_sim` is absent at document level (and when a heading could not
/// be embedded), in which case `combined` equals `content_sim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub a: PairRef,
    pub b: PairRef,
    pub heading_sim: Option<f64>,
    pub content_sim: f64,
    pub combined: f64,
    pub level: PairLevel,
}

impl PairScore {
    pub fn pair_id(&self) -> String {
        format!("{}|{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityConfig {
    /// Weight of the heading similarity in the combination.
    pub heading_weight: f64,
    pub include_intra_document: bool,
    pub top_k: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            heading_weight: 0.5,
            include_intra_document: false,
            top_k: 5,
        }
    }
}

/// One section's embeddings, ready for pairing.
#[derive(Debug, Clone)]
pub struct SectionVectors {
    pub doc_id: String,
    pub section_path: String,
    pub heading: Option<EmbeddingVector>,
    pub content: EmbeddingVector,
}

pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, SimilarityError> {
    if u.dim() != v.dim() {
        return Err(SimilarityError::DimMismatch(u.dim(), v.dim()));
    }
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return Err(SimilarityError::ZeroVector(format!(
            "norms {nu} and {nv}"
        )));
    }
    let dot: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
    // Roundoff can push identical vectors a few ulps past 1.
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// w * heading + (1 - w) * content.
pub fn combined_similarity(heading_sim: f64, content_sim: f64, w: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&w));
    w * heading_sim + (1.0 - w) * content_sim
}

/// Score every unordered pair of leaf sections from distinct documents
/// (intra-document pairs only when configured). Pairs come out in reference
/// order, which makes parallel chunking mergeable deterministically.
pub fn pairwise_sections(
    sections: &[SectionVectors],
    config: &SimilarityConfig,
) -> Result<Vec<PairScore>, SimilarityError> {
    let mut ordered: Vec<&SectionVectors> = sections.iter().collect();
    ordered.sort_by(|x, y| {
        (&x.doc_id, &x.section_path).cmp(&(&y.doc_id, &y.section_path))
    });

    let mut pairs = Vec::new();
    for i in 0..ordered.len() {
        for j in (i + 1)..ordered.len() {
            let (sa, sb) = (ordered[i], ordered[j]);
            if sa.doc_id == sb.doc_id && !config.include_intra_document {
                continue;
            }
            let content_sim = cosine(&sa.content, &sb.content).map_err(|e| match e {
                SimilarityError::ZeroVector(_) => SimilarityError::ZeroVector(format!(
                    "section {}#{} or {}#{}",
                    sa.doc_id, sa.section_path, sb.doc_id, sb.section_path
                )),
                other => other,
            })?;
            let heading_sim = match (&sa.heading, &sb.heading) {
                (Some(ha), Some(hb)) => Some(cosine(ha, hb)?),
                _ => None,
            };
            let combined = match heading_sim {
                Some(h) => combined_similarity(h, content_sim, config.heading_weight),
                None => content_sim,
            };
            pairs.push(PairScore {
                a: PairRef::section(&*sa.doc_id, &*sa.section_path),
                b: PairRef::section(&*sb.doc_id, &*sb.section_path),
                heading_sim,
                content_sim,
                combined,
                level: PairLevel::Section,
            });
        }
    }
    Ok(pairs)
}

/// Cosine of document embeddings for each unordered document pair. There is
/// no heading axis at this level; `combined` is the content similarity.
pub fn pairwise_documents(
    docs: &[(String, EmbeddingVector)],
) -> Result<Vec<PairScore>, SimilarityError> {
    let mut ordered: Vec<&(String, EmbeddingVector)> = docs.iter().collect();
    ordered.sort_by(|x, y| x.0.cmp(&y.0));

    let mut pairs = Vec::new();
    for i in 0..ordered.len() {
        for j in (i + 1)..ordered.len() {
            let (a, b) = (ordered[i], ordered[j]);
            let content_sim = cosine(&a.1, &b.1)?;
            pairs.push(PairScore {
                a: PairRef::document(&*a.0),
                b: PairRef::document(&*b.0),
                heading_sim: None,
                content_sim,
                combined: content_sim,
                level: PairLevel::Document,
            });
        }
    }
    Ok(pairs)
}

/// Top and bottom `top_k` pairs by combined score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPairs {
    pub top: Vec<PairScore>,
    pub bottom: Vec<PairScore>,
    /// Set when fewer than `2 * top_k` pairs exist, so the lists overlap.
    pub overlap_warning: bool,
}

pub fn rank_pairs(pairs: &[PairScore], top_k: usize) -> Result<RankedPairs, SimilarityError> {
    if pairs.is_empty() {
        return Err(SimilarityError::NoPairs);
    }
    let mut by_score: Vec<&PairScore> = pairs.iter().collect();
    // Ties break by pair identifier order.
    by_score.sort_by(|x, y| {
        y.combined
            .partial_cmp(&x.combined)
            .expect("finite scores")
            .then_with(|| x.pair_id().cmp(&y.pair_id()))
    });
    let top: Vec<PairScore> = by_score.iter().take(top_k).map(|p| (*p).clone()).collect();

    by_score.sort_by(|x, y| {
        x.combined
            .partial_cmp(&y.combined)
            .expect("finite scores")
            .then_with(|| x.pair_id().cmp(&y.pair_id()))
    });
    let bottom: Vec<PairScore> = by_score.iter().take(top_k).map(|p| (*p).clone()).collect();

    Ok(RankedPairs {
        top,
        bottom,
        overlap_warning: pairs.len() < 2 * top_k,
    })
}

/// Sample Pearson correlation with pairwise deletion of missing values.
pub fn pearson(xs: &[Option<f64>], ys: &[Option<f64>]) -> Result<f64, SimilarityError> {
    if xs.len() != ys.len() {
        return Err(SimilarityError::LengthMismatch(xs.len(), ys.len()));
    }
    let retained: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => Some((*x, *y)),
            _ => None,
        })
        .collect();
    if retained.len() < 2 {
        return Err(SimilarityError::InsufficientData);
    }
    let n = retained.len() as f64;
    let mean_x = retained.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = retained.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &retained {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(SimilarityError::ZeroVariance);
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}
