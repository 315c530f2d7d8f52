//! Deterministic embedding provider and cosine similarity.
//!
//! The default provider is a seeded hashed random projection: it gives every
//! token a reproducible unit vector, which is all the relevance reward and
//! the retrieval attacks need at desk scale. A stronger provider (e.g. a
//! sentence-embedding service) can be plugged in through the
//! [`EmbeddingProvider`] trait; the companion crate ships an HTTP-backed one.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::mathx;
use crate::rng::{hash_bytes, Rng};
use crate::textkit::Token;

pub const DEFAULT_DIM: usize = 64;

/// Fixed-length real vector. All values finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(pub Vec<f64>);

impl EmbeddingVector {
    pub fn zeros(dim: usize) -> Self {
        EmbeddingVector(alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn l2_norm(&self) -> f64 {
        mathx::sqrt(self.0.iter().map(|x| x * x).sum())
    }

    /// Normalize in place; a zero vector stays zero.
    pub fn normalize(&mut self) {
        let n = self.l2_norm();
        if n > 0.0 {
            for x in &mut self.0 {
                *x /= n;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedError {
    DimensionMismatch { left: usize, right: usize },
    /// External endpoint failed or was unreachable.
    ExternalProviderUnavailable(String),
    /// External endpoint returned vectors of the wrong dimension.
    ProviderDimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for EmbedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedError::DimensionMismatch { left, right } => {
                write!(f, "embedding dimension mismatch: {left} vs {right}")
            }
            EmbedError::ExternalProviderUnavailable(msg) => {
                write!(f, "external embedding provider unavailable: {msg}")
            }
            EmbedError::ProviderDimensionMismatch { expected, got } => {
                write!(f, "provider returned dimension {got}, expected {expected}")
            }
        }
    }
}

/// Source of token/sequence embeddings. Implementations must be
/// deterministic: same provider plus same input gives identical output.
pub trait EmbeddingProvider {
    fn dim(&self) -> usize;

    fn embed_token(&self, w: &Token) -> Result<EmbeddingVector, EmbedError>;

    /// Mean of token vectors, L2-normalized. Empty sequence maps to the
    /// all-zero vector so downstream cosines degrade to 0 rather than NaN.
    fn embed_seq(&self, s: &[Token]) -> Result<EmbeddingVector, EmbedError> {
        let mut acc = EmbeddingVector::zeros(self.dim());
        if s.is_empty() {
            return Ok(acc);
        }
        for tok in s {
            let v = self.embed_token(tok)?;
            for (a, b) in acc.0.iter_mut().zip(v.0.iter()) {
                *a += b;
            }
        }
        let inv = 1.0 / s.len() as f64;
        for a in &mut acc.0 {
            *a *= inv;
        }
        acc.normalize();
        Ok(acc)
    }
}

/// Seeded hashed random projection: each token hashes to a private RNG
/// stream that fills a Gaussian vector, then L2-normalizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashedProjection {
    pub seed: u64,
    pub dim: usize,
}

impl HashedProjection {
    pub fn new(seed: u64, dim: usize) -> Self {
        HashedProjection { seed, dim }
    }
}

impl Default for HashedProjection {
    fn default() -> Self {
        HashedProjection::new(0, DEFAULT_DIM)
    }
}

impl EmbeddingProvider for HashedProjection {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed_token(&self, w: &Token) -> Result<EmbeddingVector, EmbedError> {
        let mut rng = Rng::seed_from_u64(hash_bytes(self.seed, w.as_str().as_bytes()));
        let mut v = EmbeddingVector((0..self.dim).map(|_| rng.next_gaussian()).collect());
        v.normalize();
        Ok(v)
    }
}

/// dot(u,v) / (|u||v|); 0 when either norm is 0.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EmbedError> {
    if u.dim() != v.dim() {
        return Err(EmbedError::DimensionMismatch { left: u.dim(), right: v.dim() });
    }
    let nu = u.l2_norm();
    let nv = v.l2_norm();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    let dot: f64 = u.0.iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
    Ok(dot / (nu * nv))
}
