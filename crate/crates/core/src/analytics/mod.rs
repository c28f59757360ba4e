//! Clustering, 2-D projection, cluster labeling and similarity-distribution
//! statistics over section embeddings.

pub mod kde;
pub mod kmeans;
pub mod tsne;

use std::collections::BTreeMap;

use thiserror::Error;

pub use kde::{kde, kde_density, silverman_bandwidth, trapezoid_integral, DistributionData};
pub use kmeans::{kmeans, ClusterModel};
pub use tsne::{entropy_calibration_error, tsne, Projection2D};

use crate::textproc::TokenStats;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("perplexity {perplexity} must be below n - 1 = {limit}")]
    PerplexityTooLarge { perplexity: f64, limit: f64 },
    #[error("no values to estimate a density from")]
    NoValues,
}

/// Top-m terms per cluster by summed term frequency across member sections;
/// ties break alphabetically. Token stats are already stopword-filtered.
pub fn label_clusters(
    assignments: &[usize],
    section_stats: &[TokenStats],
    m: usize,
) -> BTreeMap<usize, Vec<String>> {
    assert_eq!(
        assignments.len(),
        section_stats.len(),
        "assignments must align with sections"
    );
    let mut per_cluster: BTreeMap<usize, BTreeMap<&str, u64>> = BTreeMap::new();
    for (cluster, stats) in assignments.iter().zip(section_stats) {
        let counts = per_cluster.entry(*cluster).or_default();
        for (term, count) in &stats.term_counts {
            *counts.entry(term.as_str()).or_insert(0) += count;
        }
    }
    per_cluster
        .into_iter()
        .map(|(cluster, counts)| {
            let mut terms: Vec<(&str, u64)> = counts.into_iter().collect();
            terms.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            let top: Vec<String> = terms.into_iter().take(m).map(|(t, _)| t.to_string()).collect();
            (cluster, top)
        })
        .collect()
}
