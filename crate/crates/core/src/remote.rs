//! HTTP clients for remote embedding and summarization services.
//!
//! Wire protocol (JSON over HTTP):
//! - `POST <endpoint>/v1/embed` with `{"texts": [...], "dim_hint": 768}`
//!   returns `{"vectors": [[...], ...], "dim": 768}`.
//! - `POST <endpoint>/v1/summarize` with `{"text": "...", "max_tokens": 128}`
//!   returns `{"summary": "..."}`.
//!
//! Any non-200 status or connection failure is a transport error. Results
//! are cached in memory by content hash; the cache takes shared read locks
//! and serializes writes.

use std::collections::HashMap;
use std::sync::RwLock;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::embedding::EmbeddingVector;

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("transport failure talking to {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("protocol violation from {endpoint}: {message}")]
    Protocol { endpoint: String, message: String },
    #[error("refusing to summarize empty text")]
    EmptyText,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
    dim_hint: usize,
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

#[derive(Serialize)]
struct SummarizeRequest<'a> {
    text: &'a str,
    max_tokens: usize,
}

#[derive(Deserialize)]
struct SummarizeResponse {
    summary: String,
}

type Key = [u8; 32];

fn content_hash(parts: &[&[u8]]) -> Key {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    hasher.finalize().into()
}

pub struct RemoteClient {
    endpoint: String,
    agent: ureq::Agent,
    embed_cache: RwLock<HashMap<Key, Vec<f64>>>,
    summary_cache: RwLock<HashMap<Key, String>>,
}

impl RemoteClient {
    pub fn new(endpoint: impl Into<String>) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(30))
            .build();
        RemoteClient {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            agent,
            embed_cache: RwLock::new(HashMap::new()),
            summary_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn post<Req: Serialize, Resp: for<'de> Deserialize<'de>>(
        &self,
        path: &str,
        body: &Req,
    ) -> Result<Resp, RemoteError> {
        let url = format!("{}{}", self.endpoint, path);
        let response = self
            .agent
            .post(&url)
            .send_json(body)
            .map_err(|e| RemoteError::Transport {
                endpoint: url.clone(),
                message: e.to_string(),
            })?;
        response.into_json().map_err(|e| RemoteError::Protocol {
            endpoint: url,
            message: format!("malformed response body: {e}"),
        })
    }

    /// Embed a batch of texts, one vector per input, uniform dimension.
    /// Cached texts are not re-sent.
    pub fn embed(
        &self,
        texts: &[String],
        dim_hint: usize,
    ) -> Result<Vec<EmbeddingVector>, RemoteError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let keys: Vec<Key> = texts.iter().map(|t| content_hash(&[t.as_bytes()])).collect();

        let misses: Vec<usize> = {
            let cache = self.embed_cache.read().expect("cache lock");
            keys.iter()
                .enumerate()
                .filter(|(_, k)| !cache.contains_key(*k))
                .map(|(i, _)| i)
                .collect()
        };

        if !misses.is_empty() {
            let batch: Vec<String> = misses.iter().map(|&i| texts[i].clone()).collect();
            let response: EmbedResponse = self.post(
                "/v1/embed",
                &EmbedRequest {
                    texts: &batch,
                    dim_hint,
                },
            )?;
            if response.vectors.len() != batch.len() {
                return Err(RemoteError::Protocol {
                    endpoint: self.endpoint.clone(),
                    message: format!(
                        "sent {} texts, got {} vectors",
                        batch.len(),
                        response.vectors.len()
                    ),
                });
            }
            for v in &response.vectors {
                if v.len() != response.dim {
                    return Err(RemoteError::Protocol {
                        endpoint: self.endpoint.clone(),
                        message: format!(
                            "vector dimension {} does not match declared dim {}",
                            v.len(),
                            response.dim
                        ),
                    });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(RemoteError::Protocol {
                        endpoint: self.endpoint.clone(),
                        message: "non-finite embedding component".into(),
                    });
                }
            }
            let mut cache = self.embed_cache.write().expect("cache lock");
            for (&i, v) in misses.iter().zip(response.vectors) {
                cache.insert(keys[i], v);
            }
        }

        let cache = self.embed_cache.read().expect("cache lock");
        let vectors: Vec<EmbeddingVector> = keys
            .iter()
            .map(|k| EmbeddingVector::new(cache[k].clone()))
            .collect();
        let dim = vectors[0].dim();
        if vectors.iter().any(|v| v.dim() != dim) {
            return Err(RemoteError::Protocol {
                endpoint: self.endpoint.clone(),
                message: "mixed dimensions across batch".into(),
            });
        }
        Ok(vectors)
    }

    /// Summarize one text. The empty-text check runs before any network call.
    pub fn summarize(&self, text: &str, max_tokens: usize) -> Result<String, RemoteError> {
        if text.trim().is_empty() {
            return Err(RemoteError::EmptyText);
        }
        let key = content_hash(&[&max_tokens.to_le_bytes(), text.as_bytes()]);
        if let Some(hit) = self.summary_cache.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let response: SummarizeResponse =
            self.post("/v1/summarize", &SummarizeRequest { text, max_tokens })?;
        self.summary_cache
            .write()
            .expect("cache lock")
            .insert(key, response.summary.clone());
        Ok(response.summary)
    }
}

/// Batch embedding against a remote service; `[]` maps to `[]`.
pub fn remote_embed(
    client: &RemoteClient,
    texts: &[String],
    dim_hint: usize,
) -> Result<Vec<EmbeddingVector>, RemoteError> {
    client.embed(texts, dim_hint)
}

/// Remote abstractive summary of one text.
pub fn remote_summarize(
    client: &RemoteClient,
    text: &str,
    max_tokens: usize,
) -> Result<String, RemoteError> {
    client.summarize(text, max_tokens)
}
