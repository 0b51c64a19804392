use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::transport::{token_from_env, Transport, TransportError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("malformed embedding response: {0}")]
    BadResponse(String),
    #[error("embedding has non-finite values")]
    NonFinite,
}

pub trait Embedder {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError>;
}

/// Hashed bag of words: each lowercase alphanumeric token adds ±1 to one of
/// `dim` buckets chosen by its SHA-256, then the vector is L2-normalized.
/// Empty text gives the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedder {
    pub dim: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder { dim: 64 }
    }
}

pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

impl Embedder for HashEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let mut v = vec![0.0; self.dim];
        for t in tokens(text) {
            let h = Sha256::digest(t.as_bytes());
            let bucket = u64::from_le_bytes(h[..8].try_into().expect("8 bytes")) % self.dim as u64;
            v[bucket as usize] += if h[8] & 1 == 0 { 1.0 } else { -1.0 };
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(v)
    }
}

/// Cosine similarity; 0 when either side is the zero vector. Clamped to [-1, 1].
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpEmbedderConfig {
    /// Endpoint accepting `{model, input}` and answering `{data: [{embedding}]}`.
    pub url: String,
    pub model: String,
    pub dim: usize,
    /// Environment variable holding the bearer token.
    pub token_env: String,
    pub timeout_secs: u64,
}

impl Default for HttpEmbedderConfig {
    fn default() -> Self {
        HttpEmbedderConfig {
            url: "http://localhost:8080/v1/embeddings".into(),
            model: "text-embedding".into(),
            dim: 1536,
            token_env: "FIGFORGE_EMBED_TOKEN".into(),
            timeout_secs: 30,
        }
    }
}

pub struct HttpEmbedder<'t> {
    pub config: HttpEmbedderConfig,
    pub transport: &'t dyn Transport,
}

impl Embedder for HttpEmbedder<'_> {
    fn dim(&self) -> usize {
        self.config.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let body = json!({ "model": self.config.model, "input": text });
        let token = token_from_env(&self.config.token_env);
        let resp = self.transport.post_json(
            &self.config.url,
            token.as_deref(),
            &body,
            Duration::from_secs(self.config.timeout_secs),
        )?;
        let values = resp
            .pointer("/data/0/embedding")
            .and_then(|v| v.as_array())
            .ok_or_else(|| EmbedError::BadResponse("missing data[0].embedding".into()))?;
        let v: Vec<f64> = values
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| EmbedError::BadResponse("non-numeric component".into())))
            .collect::<Result<_, _>>()?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        Ok(v)
    }
}
