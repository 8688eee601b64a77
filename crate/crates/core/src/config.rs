//! Run configuration document. One TOML file with sections for the graph
//! backend, both providers, retrieval, the engine, and the harness; every
//! field has a default so partial files work.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineConfig;
use crate::exemplar::RetrievalConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AppConfig {
    pub kg: KgSection,
    pub embedding_provider: EmbeddingSection,
    pub llm_provider: LlmSection,
    pub retrieval: RetrievalConfig,
    pub engine: EngineConfig,
    pub harness: HarnessSection,
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        toml::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KgSection {
    /// Path to a triple TSV file, or an `http(s)://` SPARQL endpoint URL.
    pub source: String,
    pub timeout_secs: u64,
    pub retries: u32,
    pub backoff_ms: u64,
    pub iri_prefix: String,
}

impl Default for KgSection {
    fn default() -> Self {
        Self {
            source: String::new(),
            timeout_secs: 10,
            retries: 2,
            backoff_ms: 250,
            iri_prefix: String::new(),
        }
    }
}

impl KgSection {
    pub fn is_remote(&self) -> bool {
        self.source.starts_with("http://") || self.source.starts_with("https://")
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    pub fn backoff(&self) -> Duration {
        Duration::from_millis(self.backoff_ms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    /// Deterministic offline embeddings; no network.
    Hash,
    Http,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingSection {
    pub kind: EmbeddingKind,
    pub model: String,
    pub dimension: usize,
    pub base_url: String,
    pub timeout_secs: u64,
    pub retries: u32,
    pub backoff_ms: u64,
    pub max_batch: usize,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        Self {
            kind: EmbeddingKind::Hash,
            model: String::new(),
            dimension: 64,
            base_url: String::new(),
            timeout_secs: 30,
            retries: 2,
            backoff_ms: 250,
            max_batch: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LlmKind {
    Http,
    Mock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmSection {
    pub kind: LlmKind,
    pub model: String,
    pub base_url: String,
    pub timeout_secs: u64,
    pub retries: u32,
    pub backoff_ms: u64,
    /// Script for `kind = "mock"`; per-question scripts given on the command
    /// line take precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mock_script: Option<PathBuf>,
}

impl Default for LlmSection {
    fn default() -> Self {
        Self {
            kind: LlmKind::Http,
            model: String::new(),
            base_url: String::new(),
            timeout_secs: 60,
            retries: 2,
            backoff_ms: 250,
            mock_script: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessSection {
    /// Persisted exemplar index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<PathBuf>,
    /// Training records backing the index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    pub parallel: usize,
    /// Re-validate every stored reasoning path against the graph after each
    /// run.
    pub validate_paths: bool,
}

impl Default for HarnessSection {
    fn default() -> Self {
        Self { index: None, train: None, parallel: 4, validate_paths: true }
    }
}
