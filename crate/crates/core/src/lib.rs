//! Analysis toolkit for standardization-meeting contribution documents.
//!
//! The pipeline parses contributions (docx, markdown, plaintext) into
//! section trees, summarizes each section, embeds headings and content as
//! fixed-dimension vectors, scores pairwise agreement between sections and
//! whole documents, clusters discussion topics, and assembles a draft
//! meeting agenda plus chart-ready data files.
//!
//! Model-backed steps (embedding, abstractive summarization) run against a
//! deterministic local baseline by default and can be redirected to a remote
//! HTTP service; see [`remote`] for the wire protocol.

pub mod analytics;
pub mod config;
pub mod embedding;
pub mod ingest;
pub mod pipeline;
pub mod remote;
pub mod report;
pub mod similarity;
pub mod summarize;
pub mod textproc;

pub use config::RunConfig;
pub use pipeline::{analyze, summarize_file, PipelineError};
pub use report::{emit_chart_data, evaluation_report, generate_agenda, AnalysisBundle};
