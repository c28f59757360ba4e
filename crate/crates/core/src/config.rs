//! Run configuration: validated up front, then serialized into the result
//! bundle so a run can be reproduced from its outputs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::embedding::Backend;

/// Full configuration of an analysis run.
///
/// `jobs` and `out_dir` are accepted from files and flags but never
/// serialized into the bundle snapshot: parallelism and the delivery
/// location must not affect analysis results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Input directory or corpus manifest (JSON).
    pub input: PathBuf,
    pub backend_embed: Backend,
    pub backend_summarize: Backend,
    pub embed_endpoint: Option<String>,
    pub summarize_endpoint: Option<String>,
    /// Embedding dimension for the baseline embedder and the remote hint.
    pub dim: usize,
    /// Weight of heading similarity in the combined score.
    pub heading_weight: f64,
    /// Cluster count for topic grouping.
    pub k: usize,
    pub perplexity: f64,
    pub tsne_iters: usize,
    /// Size of the top/bottom ranked-pair lists.
    pub top_k: usize,
    /// Agreement threshold: combined >= tau_hi is agreed.
    pub tau_hi: f64,
    /// Dispute threshold: combined <= tau_lo is disputed.
    pub tau_lo: f64,
    pub seed: u64,
    pub max_sentences: usize,
    pub min_ratio: f64,
    /// Token budget sent to the remote summarizer.
    pub max_tokens: usize,
    pub include_intra_document: bool,
    /// Cluster on content vectors only instead of weighted heading+content.
    pub cluster_content_only: bool,
    /// Average raw (unnormalized) sentence vectors instead of normalized ones.
    pub average_raw_sentences: bool,
    /// Extra stopword file, one term per line.
    pub stopword_file: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    #[serde(skip_serializing)]
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            backend_embed: Backend::Baseline,
            backend_summarize: Backend::Baseline,
            embed_endpoint: None,
            summarize_endpoint: None,
            dim: 768,
            heading_weight: 0.5,
            k: 10,
            perplexity: 30.0,
            tsne_iters: 1000,
            top_k: 5,
            tau_hi: 0.8,
            tau_lo: 0.3,
            seed: 42,
            max_sentences: 3,
            min_ratio: 0.2,
            max_tokens: 128,
            include_intra_document: false,
            cluster_content_only: false,
            average_raw_sentences: false,
            stopword_file: None,
            out_dir: PathBuf::from("out"),
            jobs: 0,
        }
    }
}

impl RunConfig {
    /// The form stored in the result bundle: delivery location and worker
    /// count reset to defaults, since neither affects analysis results.
    /// Keeps bundle round-trips exact despite the skipped fields.
    pub fn snapshot(&self) -> RunConfig {
        let defaults = RunConfig::default();
        RunConfig {
            out_dir: defaults.out_dir,
            jobs: defaults.jobs,
            ..self.clone()
        }
    }

    /// Check every invariant before any work starts.
    pub fn validate(&self) -> Result<(), String> {
        if self.dim < 2 {
            return Err(format!("dim must be at least 2, got {}", self.dim));
        }
        if !(0.0..=1.0).contains(&self.heading_weight) {
            return Err(format!(
                "heading weight must lie in [0, 1], got {}",
                self.heading_weight
            ));
        }
        if self.k < 1 {
            return Err("k must be at least 1".into());
        }
        if self.perplexity <= 0.0 {
            return Err(format!("perplexity must be positive, got {}", self.perplexity));
        }
        if self.top_k < 1 {
            return Err("top-k must be at least 1".into());
        }
        if !(0.0 <= self.tau_lo && self.tau_lo < self.tau_hi && self.tau_hi <= 1.0) {
            return Err(format!(
                "thresholds must satisfy 0 <= tau_lo < tau_hi <= 1, got tau_lo={} tau_hi={}",
                self.tau_lo, self.tau_hi
            ));
        }
        if self.max_sentences < 1 {
            return Err("max sentences must be at least 1".into());
        }
        if !(self.min_ratio > 0.0 && self.min_ratio <= 1.0) {
            return Err(format!(
                "min ratio must lie in (0, 1], got {}",
                self.min_ratio
            ));
        }
        if self.backend_embed == Backend::Remote && self.embed_endpoint.is_none() {
            return Err("remote embedding backend requires an endpoint".into());
        }
        if self.backend_summarize == Backend::Remote && self.summarize_endpoint.is_none() {
            return Err("remote summarization backend requires an endpoint".into());
        }
        Ok(())
    }
}
