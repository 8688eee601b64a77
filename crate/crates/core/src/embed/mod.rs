//! Text embedding providers and the normalized vector type they produce.

mod hash;
mod http;

pub use hash::HashEmbeddingProvider;
pub use http::{HttpEmbeddingConfig, HttpEmbeddingProvider};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding provider error: {0}")]
    Provider(String),
    #[error("provider returned dimension {actual}, expected {expected}")]
    Dimension { expected: usize, actual: usize },
    #[error("provider returned {actual} vectors for {expected} inputs")]
    Count { expected: usize, actual: usize },
    #[error("cannot embed an empty batch")]
    EmptyInput,
    #[error("vector has near-zero norm and cannot be normalized")]
    ZeroVector,
}

/// A dense embedding. Vectors handed out by [`embed_batch`] are
/// L2-normalized, so inner product equals cosine similarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector(Vec<f32>);

impl EmbeddingVector {
    pub fn from_raw(values: Vec<f32>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &EmbeddingVector) -> f32 {
        debug_assert_eq!(self.len(), other.len());
        let mut acc = 0.0f32;
        for i in 0..self.0.len() {
            acc += self.0[i] * other.0[i];
        }
        acc
    }

    pub fn norm(&self) -> f32 {
        self.dot(self).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self, EmbedError> {
        let n = self.norm();
        if !(n.is_finite() && n > 1e-12) {
            return Err(EmbedError::ZeroVector);
        }
        for v in &mut self.0 {
            *v /= n;
        }
        Ok(self)
    }
}

/// Something that can turn text into raw (unnormalized) vectors of a fixed
/// dimension. Implementations must allow concurrent callers.
pub trait EmbeddingProvider: Send + Sync {
    fn name(&self) -> &str;
    fn dimension(&self) -> usize;
    /// One raw vector per input text, order-preserving.
    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError>;
}

/// Embeds a batch and L2-normalizes every vector. Validates the provider's
/// output count and dimension against its declared contract.
pub fn embed_batch(
    provider: &dyn EmbeddingProvider,
    texts: &[String],
) -> Result<Vec<EmbeddingVector>, EmbedError> {
    if texts.is_empty() {
        return Err(EmbedError::EmptyInput);
    }
    let raw = provider.embed_raw(texts)?;
    if raw.len() != texts.len() {
        return Err(EmbedError::Count { expected: texts.len(), actual: raw.len() });
    }
    let expected = provider.dimension();
    raw.into_iter()
        .map(|values| {
            if values.len() != expected {
                return Err(EmbedError::Dimension { expected, actual: values.len() });
            }
            EmbeddingVector::from_raw(values).normalized()
        })
        .collect()
}

pub fn embed_one(
    provider: &dyn EmbeddingProvider,
    text: &str,
) -> Result<EmbeddingVector, EmbedError> {
    Ok(embed_batch(provider, &[text.to_string()])?.remove(0))
}

/// Fixed-response provider for tests.
pub struct StubEmbeddingProvider {
    pub dimension: usize,
    pub responses: std::sync::Mutex<Vec<Vec<Vec<f32>>>>,
}

impl StubEmbeddingProvider {
    pub fn new(dimension: usize, responses: Vec<Vec<Vec<f32>>>) -> Self {
        Self { dimension, responses: std::sync::Mutex::new(responses) }
    }
}

impl EmbeddingProvider for StubEmbeddingProvider {
    fn name(&self) -> &str {
        "stub"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_raw(&self, _texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        let mut responses = self.responses.lock().unwrap();
        if responses.is_empty() {
            return Err(EmbedError::Provider("stub exhausted".into()));
        }
        Ok(responses.remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_of_3_4_5_vector() {
        let stub = StubEmbeddingProvider::new(2, vec![vec![vec![3.0, 4.0]]]);
        let vecs = embed_batch(&stub, &["x".into()]).unwrap();
        assert_eq!(vecs[0].values(), &[0.6, 0.8]);
        assert!((vecs[0].norm() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_protocol_error() {
        let stub = StubEmbeddingProvider::new(3, vec![vec![vec![1.0, 0.0]]]);
        let err = embed_batch(&stub, &["x".into()]).unwrap_err();
        match err {
            EmbedError::Dimension { expected, actual } => {
                assert_eq!((expected, actual), (3, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_batch_rejected() {
        let stub = StubEmbeddingProvider::new(2, vec![]);
        assert!(matches!(embed_batch(&stub, &[]), Err(EmbedError::EmptyInput)));
    }

    #[test]
    fn zero_vector_rejected() {
        let stub = StubEmbeddingProvider::new(2, vec![vec![vec![0.0, 0.0]]]);
        assert!(matches!(embed_batch(&stub, &["x".into()]), Err(EmbedError::ZeroVector)));
    }
}
