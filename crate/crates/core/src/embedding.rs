//! Fixed-dimension text vectors: a deterministic hashed tf-idf baseline, plus
//! section/document averaging.
//!
//! The baseline uses unsigned feature hashing (no sign flips), so every
//! component is non-negative and all pairwise cosines land in [0, 1]. A
//! remote embedding service can replace the baseline; see [`crate::remote`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textproc::TokenStats;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("cannot fit idf weights on an empty corpus")]
    EmptyCorpus,
    #[error("text has no embeddable tokens")]
    EmptyText,
    #[error("section has no sentence vectors")]
    EmptySection,
    #[error("document has no section vectors")]
    EmptyDocument,
    #[error("vector dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
}

/// A dense real vector of fixed dimension. All values are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        EmbeddingVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Corpus-derived inverse document frequencies. Terms never seen in the
/// corpus fall back to the df = 0 weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfMap {
    pub weights: BTreeMap<String, f64>,
    pub default_weight: f64,
}

impl IdfMap {
    pub fn uniform() -> Self {
        IdfMap {
            weights: BTreeMap::new(),
            default_weight: 1.0,
        }
    }

    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(self.default_weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Baseline,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    pub backend: Backend,
    pub dim: usize,
    pub idf: IdfMap,
    pub hash_seed: u64,
}

impl EmbedderConfig {
    pub fn baseline(dim: usize, idf: IdfMap, hash_seed: u64) -> Self {
        EmbedderConfig {
            backend: Backend::Baseline,
            dim,
            idf,
            hash_seed,
        }
    }
}

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1 over the given per-section token
/// stats, where df counts sections containing t.
pub fn fit_idf(sections: &[TokenStats]) -> Result<IdfMap, EmbedError> {
    if sections.is_empty() {
        return Err(EmbedError::EmptyCorpus);
    }
    let n = sections.len() as f64;
    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    for stats in sections {
        for term in stats.terms() {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let weights = df
        .into_iter()
        .map(|(term, count)| {
            let w = ((1.0 + n) / (1.0 + count as f64)).ln() + 1.0;
            (term.to_string(), w)
        })
        .collect();
    Ok(IdfMap {
        weights,
        default_weight: (1.0 + n).ln() + 1.0,
    })
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the little-endian seed bytes followed by the term bytes.
fn fnv1a64(seed: u64, term: &str) -> u64 {
    let mut hash = FNV_OFFSET;
    for byte in seed.to_le_bytes().into_iter().chain(term.bytes()) {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Bucket index for a term under the given config.
pub fn term_index(term: &str, config: &EmbedderConfig) -> usize {
    (fnv1a64(config.hash_seed, term) % config.dim as u64) as usize
}

/// Hashed tf-idf embedding, L2-normalized. Collisions add (never cancel),
/// keeping every component non-negative.
pub fn embed_text_baseline(
    stats: &TokenStats,
    config: &EmbedderConfig,
) -> Result<EmbeddingVector, EmbedError> {
    let mut values = accumulate(stats, config)?;
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    debug_assert!(norm > 0.0);
    for v in &mut values {
        *v /= norm;
    }
    Ok(EmbeddingVector(values))
}

/// Same accumulation without the final normalization, for pipelines that
/// average raw sentence vectors.
pub fn embed_text_baseline_raw(
    stats: &TokenStats,
    config: &EmbedderConfig,
) -> Result<EmbeddingVector, EmbedError> {
    accumulate(stats, config).map(EmbeddingVector)
}

fn accumulate(stats: &TokenStats, config: &EmbedderConfig) -> Result<Vec<f64>, EmbedError> {
    if stats.is_empty() {
        return Err(EmbedError::EmptyText);
    }
    let mut values = vec![0.0f64; config.dim];
    for (term, count) in &stats.term_counts {
        let idx = term_index(term, config);
        values[idx] += *count as f64 * config.idf.weight(term);
    }
    Ok(values)
}

fn mean_of(vectors: &[EmbeddingVector]) -> Result<EmbeddingVector, EmbedError> {
    let first_dim = vectors[0].dim();
    for v in vectors {
        if v.dim() != first_dim {
            return Err(EmbedError::DimMismatch(first_dim, v.dim()));
        }
    }
    let n = vectors.len() as f64;
    let mut mean = vec![0.0f64; first_dim];
    for v in vectors {
        for (acc, x) in mean.iter_mut().zip(v.values()) {
            *acc += x;
        }
    }
    for acc in &mut mean {
        *acc /= n;
    }
    Ok(EmbeddingVector(mean))
}

/// Component-wise mean of the section's sentence vectors. No
/// re-normalization: cosine is scale-invariant.
pub fn section_embedding(sentence_vectors: &[EmbeddingVector]) -> Result<EmbeddingVector, EmbedError> {
    if sentence_vectors.is_empty() {
        return Err(EmbedError::EmptySection);
    }
    mean_of(sentence_vectors)
}

/// Component-wise mean of the document's leaf-section content vectors.
pub fn document_embedding(section_vectors: &[EmbeddingVector]) -> Result<EmbeddingVector, EmbedError> {
    if section_vectors.is_empty() {
        return Err(EmbedError::EmptyDocument);
    }
    mean_of(section_vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::cosine;
    use crate::textproc::{tokenize, Stopwords};
    use approx::assert_relative_eq;

    fn stats(text: &str) -> TokenStats {
        tokenize(text, &Stopwords::empty())
    }

    fn config(dim: usize, seed: u64) -> EmbedderConfig {
        EmbedderConfig::baseline(dim, IdfMap::uniform(), seed)
    }

    #[test]
    fn idf_term_in_every_section_is_one() {
        let corpus: Vec<TokenStats> = (0..4).map(|_| stats("bandwidth uplink")).collect();
        let idf = fit_idf(&corpus).unwrap();
        assert_relative_eq!(idf.weight("bandwidth"), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn idf_rare_term_matches_hand_evaluation() {
        let mut corpus: Vec<TokenStats> = (0..3).map(|_| stats("bandwidth uplink")).collect();
        corpus.push(stats("bandwidth redcap"));
        let idf = fit_idf(&corpus).unwrap();
        // ln(5/2) + 1
        assert_relative_eq!(idf.weight("redcap"), 1.916_290_731_874_155, epsilon = 1e-12);
    }

    #[test]
    fn idf_empty_corpus_is_an_error() {
        assert!(matches!(fit_idf(&[]), Err(EmbedError::EmptyCorpus)));
    }

    #[test]
    fn idf_unseen_term_uses_df_zero_weight() {
        let corpus: Vec<TokenStats> = (0..4).map(|_| stats("bandwidth")).collect();
        let idf = fit_idf(&corpus).unwrap();
        assert_relative_eq!(idf.weight("nothere"), 5.0f64.ln() + 1.0, epsilon = 1e-12);
    }

    #[test]
    fn self_similarity_is_one() {
        let v = embed_text_baseline(&stats("the ue supports 20MHz uplink"), &config(64, 7)).unwrap();
        assert_relative_eq!(cosine(&v, &v).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_sparse_vector_dim8_seed0() {
        // Pinned from an independent FNV-1a evaluation:
        // index("bandwidth") = 2, index("uplink") = 0, weights 2 and 1, norm sqrt(5).
        let mut ts = TokenStats::default();
        ts.term_counts.insert("bandwidth".into(), 2);
        ts.term_counts.insert("uplink".into(), 1);
        ts.total_tokens = 3;
        let v = embed_text_baseline(&ts, &config(8, 0)).unwrap();
        let expected = [
            0.447_213_595_499_957_9,
            0.0,
            0.894_427_190_999_915_9,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ];
        for (got, want) in v.values().iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn disjoint_vocabulary_is_orthogonal_at_large_dim() {
        let cfg = config(1 << 20, 0);
        let a = embed_text_baseline(&stats("alpha beta gamma"), &cfg).unwrap();
        let b = embed_text_baseline(&stats("delta epsilon zeta"), &cfg).unwrap();
        assert_relative_eq!(cosine(&a, &b).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn components_are_non_negative() {
        let v = embed_text_baseline(&stats("redcap ue bandwidth uplink downlink"), &config(16, 3))
            .unwrap();
        assert!(v.values().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn empty_text_is_an_error() {
        assert!(matches!(
            embed_text_baseline(&TokenStats::default(), &config(8, 0)),
            Err(EmbedError::EmptyText)
        ));
    }

    #[test]
    fn embedding_is_deterministic() {
        let cfg = config(768, 42);
        let a = embed_text_baseline(&stats("redcap bandwidth reduction"), &cfg).unwrap();
        let b = embed_text_baseline(&stats("redcap bandwidth reduction"), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn section_mean_of_one_is_identity() {
        let v = EmbeddingVector::new(vec![0.6, 0.8]);
        let mean = section_embedding(std::slice::from_ref(&v)).unwrap();
        assert_eq!(mean, v);
    }

    #[test]
    fn section_mean_is_componentwise() {
        let a = EmbeddingVector::new(vec![1.0, 0.0]);
        let b = EmbeddingVector::new(vec![0.0, 1.0]);
        let mean = section_embedding(&[a, b]).unwrap();
        assert_eq!(mean.values(), &[0.5, 0.5]);
    }

    #[test]
    fn empty_section_is_an_error() {
        assert!(matches!(section_embedding(&[]), Err(EmbedError::EmptySection)));
    }

    #[test]
    fn section_mean_commutes_with_permutation_and_replication() {
        let a = EmbeddingVector::new(vec![0.2, 0.4, 0.4]);
        let b = EmbeddingVector::new(vec![0.5, 0.1, 0.0]);
        let c = EmbeddingVector::new(vec![0.3, 0.3, 0.3]);
        let fwd = section_embedding(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let rev = section_embedding(&[c.clone(), b.clone(), a.clone()]).unwrap();
        for (x, y) in fwd.values().iter().zip(rev.values()) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
        let doubled =
            section_embedding(&[a.clone(), b.clone(), c.clone(), a, b, c]).unwrap();
        for (x, y) in fwd.values().iter().zip(doubled.values()) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn document_mean_matches_hand_average() {
        let s1 = EmbeddingVector::new(vec![1.0, 0.0]);
        let s2 = EmbeddingVector::new(vec![0.0, 1.0]);
        let s3 = EmbeddingVector::new(vec![1.0, 1.0]);
        let dv = document_embedding(&[s1, s2, s3]).unwrap();
        assert_relative_eq!(dv.values()[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(dv.values()[1], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_document_is_an_error() {
        assert!(matches!(document_embedding(&[]), Err(EmbedError::EmptyDocument)));
    }

    #[test]
    fn dim_mismatch_is_detected() {
        let a = EmbeddingVector::new(vec![1.0, 0.0]);
        let b = EmbeddingVector::new(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            section_embedding(&[a, b]),
            Err(EmbedError::DimMismatch(2, 3))
        ));
    }
}
