//! Deterministic offline embeddings derived from SHA-256 digests.
//!
//! Identical texts map to identical vectors (cosine 1.0); distinct texts map
//! to effectively orthogonal directions. That is exactly the behavior the
//! offline fixtures and the no-network evaluation path need: retrieval hits
//! are decided by exact templated-text equality.

use sha2::{Digest, Sha256};

use super::{EmbedError, EmbeddingProvider};

pub struct HashEmbeddingProvider {
    dimension: usize,
    name: String,
}

impl HashEmbeddingProvider {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension >= 1, "embedding dimension must be at least 1");
        Self { dimension, name: format!("hash-{dimension}") }
    }

    fn vector_for(&self, text: &str) -> Vec<f32> {
        let mut values = Vec::with_capacity(self.dimension);
        let mut block: u32 = 0;
        while values.len() < self.dimension {
            let mut hasher = Sha256::new();
            hasher.update(text.as_bytes());
            hasher.update(block.to_le_bytes());
            let digest = hasher.finalize();
            for chunk in digest.chunks_exact(4) {
                if values.len() == self.dimension {
                    break;
                }
                let word = u32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
                // map to [-1, 1)
                let unit = (word as f64) / (u32::MAX as f64 + 1.0);
                values.push((unit * 2.0 - 1.0) as f32);
            }
            block += 1;
        }
        values
    }
}

impl EmbeddingProvider for HashEmbeddingProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed_raw(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, EmbedError> {
        Ok(texts.iter().map(|t| self.vector_for(t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed_batch;

    #[test]
    fn deterministic_and_text_sensitive() {
        let p = HashEmbeddingProvider::new(64);
        let a = embed_batch(&p, &["what country was <person> born in".into()]).unwrap();
        let b = embed_batch(&p, &["what country was <person> born in".into()]).unwrap();
        let c = embed_batch(&p, &["what instrument does <person> play".into()]).unwrap();
        assert_eq!(a, b);
        assert!((a[0].dot(&b[0]) - 1.0).abs() < 1e-6);
        assert!(a[0].dot(&c[0]).abs() < 0.7, "distinct texts should not be near-parallel");
    }

    #[test]
    fn odd_dimension_fills_from_extra_blocks() {
        let p = HashEmbeddingProvider::new(13);
        let vecs = p.embed_raw(&["x".into()]).unwrap();
        assert_eq!(vecs[0].len(), 13);
    }
}
