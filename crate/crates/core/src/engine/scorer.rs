//! Entity relevance scoring, used to cap oversized candidate sets. The
//! default implementation reuses the embedding provider; anything that can
//! rank labels against a question fits behind the trait.

use thiserror::Error;

use crate::embed::{embed_batch, EmbeddingProvider};

#[derive(Debug, Error)]
#[error("relevance scorer: {0}")]
pub struct ScoreError(pub String);

pub trait RelevanceScorer: Send + Sync {
    /// One score per label; higher means more relevant to the question.
    fn score(&self, question: &str, labels: &[String]) -> Result<Vec<f64>, ScoreError>;
}

/// Cosine similarity between the question embedding and each label
/// embedding, computed in a single provider batch.
pub struct EmbeddingScorer<'a> {
    provider: &'a dyn EmbeddingProvider,
}

impl<'a> EmbeddingScorer<'a> {
    pub fn new(provider: &'a dyn EmbeddingProvider) -> Self {
        Self { provider }
    }
}

impl RelevanceScorer for EmbeddingScorer<'_> {
    fn score(&self, question: &str, labels: &[String]) -> Result<Vec<f64>, ScoreError> {
        let mut texts = Vec::with_capacity(labels.len() + 1);
        texts.push(question.to_string());
        texts.extend_from_slice(labels);
        let vectors = embed_batch(self.provider, &texts).map_err(|e| ScoreError(e.to_string()))?;
        let (question_vec, label_vecs) = vectors.split_first().expect("non-empty batch");
        Ok(label_vecs.iter().map(|v| question_vec.dot(v) as f64).collect())
    }
}

/// Scores everything 0.0, making cap survival depend purely on the
/// ascending-id tie-break. Useful in tests and as an explicit "no semantic
/// scoring" choice.
pub struct UniformScorer;

impl RelevanceScorer for UniformScorer {
    fn score(&self, _question: &str, labels: &[String]) -> Result<Vec<f64>, ScoreError> {
        Ok(vec![0.0; labels.len()])
    }
}
