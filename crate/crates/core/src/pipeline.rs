//! Full analysis orchestration: ingest, token statistics, embeddings,
//! summaries, pairwise similarity, clustering, projection, distributions,
//! and the assembled bundle. Results are deterministic for a fixed seed and
//! independent of worker count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{self, kmeans, label_clusters, tsne};
use crate::config::RunConfig;
use crate::embedding::{
    document_embedding, embed_text_baseline, embed_text_baseline_raw, fit_idf, section_embedding,
    Backend, EmbedderConfig, EmbeddingVector,
};
use crate::ingest::{self, CorpusDocument, Section};
use crate::remote::{RemoteClient, RemoteError};
use crate::report::{build_agenda, bucket_pairs, AnalysisBundle, DocMeta, SectionMeta};
use crate::similarity::{
    pairwise_documents, pairwise_sections, rank_pairs, PairRef, SectionVectors, SimilarityConfig,
};
use crate::summarize::{
    extractive_summary, section_sentences, SummaryMethod, SummaryRecord,
};
use crate::textproc::{detect_markers, tokenize, Stopwords, TokenStats};

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Bad or insufficient input; maps to exit code 1.
    #[error("{0}")]
    Input(String),
    /// Remote backend failure; maps to exit code 2.
    #[error(transparent)]
    Backend(#[from] RemoteError),
}

impl From<ingest::IngestError> for PipelineError {
    fn from(e: ingest::IngestError) -> Self {
        PipelineError::Input(e.to_string())
    }
}

/// One leaf section prepared for analysis.
struct SectionUnit {
    doc_id: String,
    company: String,
    path: String,
    heading: String,
    sentences: Vec<String>,
    content_stats: TokenStats,
    heading_stats: TokenStats,
    markers: crate::textproc::MarkerCounts,
    image_count: usize,
    section: Section,
}

fn load_stopwords(config: &RunConfig) -> Result<Stopwords, PipelineError> {
    let mut stopwords = Stopwords::default();
    if let Some(path) = &config.stopword_file {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::Input(format!("cannot read stopword file {}: {e}", path.display()))
        })?;
        stopwords.extend_from(&text);
    }
    Ok(stopwords)
}

fn collect_units(
    corpus: &[CorpusDocument],
    stopwords: &Stopwords,
    warnings: &mut Vec<String>,
) -> Vec<SectionUnit> {
    let mut units = Vec::new();
    for doc in corpus.iter().filter(|d| !d.is_chair()) {
        for (path, section) in ingest::leaf_sections_with_paths(&doc.document) {
            let sentences = section_sentences(section);
            let content_stats = {
                let mut stats = TokenStats::default();
                for sentence in &sentences {
                    stats.absorb(&tokenize(sentence, stopwords));
                }
                stats
            };
            if content_stats.is_empty() {
                warnings.push(format!(
                    "skipped section {}#{} (\"{}\"): no embeddable text",
                    doc.document.id, path, section.heading
                ));
                continue;
            }
            units.push(SectionUnit {
                doc_id: doc.document.id.clone(),
                company: doc.document.company.clone(),
                path,
                heading: section.heading.clone(),
                heading_stats: tokenize(&section.heading, stopwords),
                content_stats,
                markers: detect_markers(section),
                image_count: section.image_count,
                sentences,
                section: section.clone(),
            });
        }
    }
    units
}

/// Per-unit (content, heading) embeddings from the deterministic baseline.
fn baseline_embeddings(
    units: &[SectionUnit],
    config: &RunConfig,
    stopwords: &Stopwords,
) -> Result<Vec<(EmbeddingVector, Option<EmbeddingVector>)>, PipelineError> {
    let idf = fit_idf(
        &units
            .iter()
            .map(|u| u.content_stats.clone())
            .collect::<Vec<_>>(),
    )
    .map_err(|_| PipelineError::Input("no analyzable text in the corpus".into()))?;
    let embedder = EmbedderConfig::baseline(config.dim, idf, config.seed);

    let embed_one = |u: &SectionUnit| -> (EmbeddingVector, Option<EmbeddingVector>) {
        let mut sentence_vectors = Vec::with_capacity(u.sentences.len());
        for sentence in &u.sentences {
            let stats = tokenize(sentence, stopwords);
            if stats.is_empty() {
                continue;
            }
            let v = if config.average_raw_sentences {
                embed_text_baseline_raw(&stats, &embedder)
            } else {
                embed_text_baseline(&stats, &embedder)
            }
            .expect("non-empty stats embed");
            sentence_vectors.push(v);
        }
        debug_assert!(!sentence_vectors.is_empty());
        let content = section_embedding(&sentence_vectors).expect("at least one sentence vector");
        let heading = if u.heading_stats.is_empty() {
            None
        } else {
            Some(embed_text_baseline(&u.heading_stats, &embedder).expect("non-empty heading"))
        };
        (content, heading)
    };

    Ok(units.par_iter().map(embed_one).collect())
}

/// Per-unit embeddings from the remote service: one batched call covering
/// every sentence and heading, distributed back in order.
fn remote_embeddings(
    units: &[SectionUnit],
    config: &RunConfig,
) -> Result<Vec<(EmbeddingVector, Option<EmbeddingVector>)>, PipelineError> {
    let endpoint = config
        .embed_endpoint
        .as_ref()
        .ok_or_else(|| PipelineError::Input("remote embedding backend requires an endpoint".into()))?;
    let client = RemoteClient::new(endpoint.clone());

    let mut texts = Vec::new();
    let mut spans = Vec::with_capacity(units.len());
    for unit in units {
        let start = texts.len();
        texts.extend(unit.sentences.iter().cloned());
        let has_heading = !unit.heading.trim().is_empty();
        if has_heading {
            texts.push(unit.heading.clone());
        }
        spans.push((start, unit.sentences.len(), has_heading));
    }

    let vectors = client.embed(&texts, config.dim)?;
    let mut out = Vec::with_capacity(units.len());
    for (start, n_sentences, has_heading) in spans {
        let sentence_vectors = &vectors[start..start + n_sentences];
        let content = section_embedding(sentence_vectors)
            .map_err(|e| PipelineError::Input(e.to_string()))?;
        let heading = has_heading.then(|| vectors[start + n_sentences].clone());
        out.push((content, heading));
    }
    Ok(out)
}

fn summaries(
    units: &[SectionUnit],
    config: &RunConfig,
    stopwords: &Stopwords,
) -> Result<Vec<SummaryRecord>, PipelineError> {
    match config.backend_summarize {
        Backend::Baseline => Ok(units
            .par_iter()
            .map(|u| {
                extractive_summary(
                    PairRef::section(&*u.doc_id, &*u.path),
                    &u.section,
                    config.max_sentences,
                    config.min_ratio,
                    stopwords,
                )
                .expect("non-empty section has sentences")
            })
            .collect()),
        Backend::Remote => {
            let endpoint = config.summarize_endpoint.as_ref().ok_or_else(|| {
                PipelineError::Input("remote summarization backend requires an endpoint".into())
            })?;
            let client = RemoteClient::new(endpoint.clone());
            units
                .iter()
                .map(|u| {
                    let text = u.section.body_text();
                    let summary_text = client.summarize(&text, config.max_tokens)?;
                    let summary_sentences =
                        crate::textproc::split_sentences(&summary_text).len();
                    Ok(SummaryRecord {
                        section_ref: PairRef::section(&*u.doc_id, &*u.path),
                        heading: u.heading.clone(),
                        summary_text,
                        method: SummaryMethod::Remote,
                        markers: u.markers,
                        sentence_count_original: u.sentences.len(),
                        sentence_count_summary: summary_sentences,
                    })
                })
                .collect()
        }
    }
}

fn corpus_digest(corpus: &[CorpusDocument]) -> String {
    let mut ordered: Vec<&CorpusDocument> = corpus.iter().collect();
    ordered.sort_by(|a, b| a.document.id.cmp(&b.document.id));
    let mut hasher = Sha256::new();
    for doc in ordered {
        hasher.update(doc.document.id.as_bytes());
        hasher.update([0]);
        hasher.update(doc.document.company.as_bytes());
        hasher.update([0]);
        hasher.update(doc.role.clone().unwrap_or_default().as_bytes());
        hasher.update([0]);
        for paragraph in doc.document.body_paragraphs() {
            hasher.update(paragraph.as_bytes());
            hasher.update([1]);
        }
        hasher.update([2]);
    }
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Run the whole pipeline. Parallel work is bounded by `config.jobs`
/// (0 = all cores); any worker count produces identical results.
pub fn analyze(config: &RunConfig) -> Result<AnalysisBundle, PipelineError> {
    config.validate().map_err(PipelineError::Input)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| PipelineError::Input(format!("cannot build worker pool: {e}")))?;
    pool.install(|| analyze_inner(config))
}

fn analyze_inner(config: &RunConfig) -> Result<AnalysisBundle, PipelineError> {
    let stopwords = load_stopwords(config)?;
    let corpus = ingest::load_corpus(&config.input)?;
    if corpus.is_empty() {
        return Err(PipelineError::Input(format!(
            "no parsable documents in {}",
            config.input.display()
        )));
    }

    let mut warnings = Vec::new();
    for doc in corpus.iter().filter(|d| d.is_chair()) {
        warnings.push(format!(
            "document {} has role \"chair\" and is excluded from analysis",
            doc.document.id
        ));
    }

    let units = collect_units(&corpus, &stopwords, &mut warnings);
    if units.is_empty() {
        return Err(PipelineError::Input(
            "no analyzable sections in the corpus".into(),
        ));
    }

    let embeddings = match config.backend_embed {
        Backend::Baseline => baseline_embeddings(&units, config, &stopwords)?,
        Backend::Remote => remote_embeddings(&units, config)?,
    };

    let summaries = summaries(&units, config, &stopwords)?;

    // Pairwise similarity at section and document level.
    let section_vectors: Vec<SectionVectors> = units
        .iter()
        .zip(&embeddings)
        .map(|(u, (content, heading))| SectionVectors {
            doc_id: u.doc_id.clone(),
            section_path: u.path.clone(),
            heading: heading.clone(),
            content: content.clone(),
        })
        .collect();
    let sim_config = SimilarityConfig {
        heading_weight: config.heading_weight,
        include_intra_document: config.include_intra_document,
        top_k: config.top_k,
    };
    let section_pairs = pairwise_sections(&section_vectors, &sim_config)
        .map_err(|e| PipelineError::Input(e.to_string()))?;

    let mut per_doc: BTreeMap<&str, Vec<EmbeddingVector>> = BTreeMap::new();
    for (u, (content, _)) in units.iter().zip(&embeddings) {
        per_doc.entry(&u.doc_id).or_default().push(content.clone());
    }
    let doc_vectors: Vec<(String, EmbeddingVector)> = per_doc
        .into_iter()
        .map(|(id, vectors)| {
            let v = document_embedding(&vectors).expect("non-empty document");
            (id.to_string(), v)
        })
        .collect();
    let document_pairs =
        pairwise_documents(&doc_vectors).map_err(|e| PipelineError::Input(e.to_string()))?;

    let ranked_sections = rank_pairs(&section_pairs, config.top_k).ok();
    let ranked_documents = rank_pairs(&document_pairs, config.top_k).ok();
    if ranked_sections
        .as_ref()
        .map(|r| r.overlap_warning)
        .unwrap_or(false)
    {
        warnings.push(format!(
            "fewer than {} section pairs; top and bottom lists overlap",
            2 * config.top_k
        ));
    }

    // Clustering input: w-scaled heading next to (1-w)-scaled content, or
    // content only.
    let cluster_vectors: Vec<Vec<f64>> = units
        .iter()
        .zip(&embeddings)
        .map(|(_, (content, heading))| {
            if config.cluster_content_only {
                content.values().to_vec()
            } else {
                let w = config.heading_weight;
                let mut v = Vec::with_capacity(2 * config.dim);
                match heading {
                    Some(h) => v.extend(h.values().iter().map(|x| x * w)),
                    None => v.resize(content.dim(), 0.0),
                }
                v.extend(content.values().iter().map(|x| x * (1.0 - w)));
                v
            }
        })
        .collect();

    let k = config.k.min(units.len());
    if k < config.k {
        warnings.push(format!(
            "k reduced from {} to {} (only {} sections)",
            config.k,
            k,
            units.len()
        ));
    }
    let mut cluster_model = kmeans(
        &cluster_vectors,
        k,
        config.seed,
        analytics::kmeans::DEFAULT_MAX_ITER,
        analytics::kmeans::DEFAULT_TOL,
    )
    .map_err(|e| PipelineError::Input(e.to_string()))?;
    let content_stats: Vec<TokenStats> = units.iter().map(|u| u.content_stats.clone()).collect();
    cluster_model.labels = label_clusters(&cluster_model.assignments, &content_stats, 3);

    if units.len() < 4 {
        return Err(PipelineError::Input(format!(
            "projection needs at least 4 sections, corpus has {}",
            units.len()
        )));
    }
    let max_perplexity = (units.len() - 1) as f64;
    let perplexity = if config.perplexity >= max_perplexity {
        let adjusted = (max_perplexity / 3.0).max(2.0);
        warnings.push(format!(
            "perplexity reduced from {} to {} for {} sections",
            config.perplexity,
            adjusted,
            units.len()
        ));
        adjusted
    } else {
        config.perplexity
    };
    let projection = tsne(&cluster_vectors, perplexity, config.seed, config.tsne_iters)
        .map_err(|e| PipelineError::Input(e.to_string()))?;

    // Similarity distributions over the scored pairs.
    let heading_sims: Vec<f64> = section_pairs.iter().filter_map(|p| p.heading_sim).collect();
    let content_sims: Vec<f64> = section_pairs.iter().map(|p| p.content_sim).collect();
    let mut distributions = Vec::new();
    match analytics::kde("headings", &heading_sims, None) {
        Ok(d) => distributions.push(d),
        Err(_) => warnings.push("no heading similarities; headings distribution omitted".into()),
    }
    match analytics::kde("content", &content_sims, None) {
        Ok(d) => distributions.push(d),
        Err(_) => warnings.push("no content similarities; content distribution omitted".into()),
    }

    let documents: Vec<DocMeta> = corpus
        .iter()
        .map(|d| DocMeta {
            id: d.document.id.clone(),
            company: d.document.company.clone(),
            title: d.document.title.clone(),
            source_format: d.document.source_format,
            role: d.role.clone(),
            analyzed: !d.is_chair(),
        })
        .collect();
    let sections: Vec<SectionMeta> = units
        .iter()
        .map(|u| SectionMeta {
            doc_id: u.doc_id.clone(),
            path: u.path.clone(),
            heading: u.heading.clone(),
            company: u.company.clone(),
            markers: u.markers,
            image_count: u.image_count,
        })
        .collect();

    let buckets = bucket_pairs(&section_pairs, config.tau_hi, config.tau_lo)
        .map_err(|e| PipelineError::Input(e.to_string()))?;
    let doc_companies: BTreeMap<String, String> = documents
        .iter()
        .map(|d| (d.id.clone(), d.company.clone()))
        .collect();
    let agenda = build_agenda(
        &sections,
        &cluster_model.assignments,
        &cluster_model.labels,
        &summaries,
        &buckets,
        &doc_companies,
    );

    let bundle = AnalysisBundle {
        manifest_digest: corpus_digest(&corpus),
        documents,
        sections,
        summaries,
        section_pairs,
        document_pairs,
        ranked_sections,
        ranked_documents,
        cluster_model,
        projection,
        distributions,
        agenda,
        warnings,
        config: config.snapshot(),
    };
    debug_assert_eq!(bundle.validate_references(), Ok(()));
    Ok(bundle)
}

/// Summarize one document, section by section, for the `summarize` command.
pub fn summarize_file(
    path: &std::path::Path,
    config: &RunConfig,
) -> Result<Vec<SummaryRecord>, PipelineError> {
    let stopwords = load_stopwords(config)?;
    let doc = ingest::load_document(path)?;
    let client = match config.backend_summarize {
        Backend::Remote => {
            let endpoint = config.summarize_endpoint.as_ref().ok_or_else(|| {
                PipelineError::Input("remote summarization backend requires an endpoint".into())
            })?;
            Some(RemoteClient::new(endpoint.clone()))
        }
        Backend::Baseline => None,
    };

    let mut records = Vec::new();
    for (section_path, section) in ingest::leaf_sections_with_paths(&doc) {
        let sentences = section_sentences(section);
        if sentences.is_empty() {
            continue;
        }
        let record = match &client {
            None => extractive_summary(
                PairRef::section(&*doc.id, &*section_path),
                section,
                config.max_sentences,
                config.min_ratio,
                &stopwords,
            )
            .expect("section has sentences"),
            Some(client) => {
                let summary_text = client.summarize(&section.body_text(), config.max_tokens)?;
                SummaryRecord {
                    section_ref: PairRef::section(&*doc.id, &*section_path),
                    heading: section.heading.clone(),
                    summary_text: summary_text.clone(),
                    method: SummaryMethod::Remote,
                    markers: detect_markers(section),
                    sentence_count_original: sentences.len(),
                    sentence_count_summary: crate::textproc::split_sentences(&summary_text).len(),
                }
            }
        };
        records.push(record);
    }
    if records.is_empty() {
        return Err(PipelineError::Input(format!(
            "no summarizable sections in {}",
            path.display()
        )));
    }
    Ok(records)
}
