//! HTTP embedding client. POSTs `{"model", "input": [...]}` and expects
//! `{"data": [{"embedding": [...]}, ...]}` with order preserved.

use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{EmbedError, EmbeddingProvider};

pub const EMBED_API_KEY_VAR: &str = "EMBED_API_KEY";

#[derive(Debug, Clone)]
pub struct HttpEmbeddingConfig {
    pub base_url: String,
    pub model: String,
    pub dimension: usize,
    pub timeout: Duration,
    pub retries: u32,
    pub backoff: Duration,
    /// Requests are split into chunks of at most this many texts.
    pub max_batch: usize,
}

impl Default for HttpEmbeddingConfig {
    fn default() -> Self {
        Self {
            base_url: String::new(),
            model: String::new(),
            dimension: 0,
            timeout: Duration::from_secs(30),
            retries: 2,
            backoff: Duration::from_millis(250),
            max_batch: 64,
        }
    }
}

pub struct HttpEmbeddingProvider {
    config: HttpEmbeddingConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
    name: String,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f32>,
}

impl HttpEmbeddingProvider {
    /// Credential, when needed, comes from the `EMBED_API_KEY` environment
    /// variable and is sent as a bearer token.
    pub fn new(config: HttpEmbeddingConfig) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        let api_key = std::env::var(EMBED_API_KEY_VAR).ok().filter(|k| !k.is_empty());
        let name = config.model.clone();
        Ok(Self { config, client, api_key, name })
    }

    fn post_chunk(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        let body = json!({ "model": self.config.model, "input": texts });
        let mut last_err = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff);
            }
            let mut req = self.client.post(&self.config.base_url).json(&body);
            if let Some(key) = &self.api_key {
                req = req.header("Authorization", format!("Bearer {key}"));
            }
            match req.send() {
                Ok(resp) if resp.status().is_success() => {
                    let parsed: EmbeddingResponse =
                        resp.json().map_err(|e| EmbedError::Provider(e.to_string()))?;
                    return Ok(parsed.data.into_iter().map(|d| d.embedding).collect());
                }
                Ok(resp) => last_err = format!("endpoint returned HTTP {}", resp.status()),
                Err(e) => last_err = e.to_string(),
            }
        }
        Err(EmbedError::Provider(last_err))
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.config.dimension
    }

    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.config.max_batch.max(1)) {
            out.extend(self.post_chunk(chunk)?);
        }
        Ok(out)
    }
}
