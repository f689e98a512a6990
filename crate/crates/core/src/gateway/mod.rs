//! Model-service gateway: synchronous traits for text generation, embedding
//! and relevance scoring, with HTTP-backed and scripted-mock implementations.
//!
//! Every pipeline stage that needs a model goes through these traits, so the
//! whole system runs against real endpoints, against deterministic mocks
//! (offline mode), or against a mix of the two.

mod http;
mod profiles;

pub use http::{HttpEndpoint, HttpProfile};
pub use profiles::{
    build_embedding_service, build_generation_service, build_scoring_service, EndpointConfig,
};

use serde::{Deserialize, Serialize};

/// Gateway failure modes.
///
/// `Transport` and `Server` are retryable at the gateway level; `Fatal`
/// (4xx, malformed payloads, exhausted retries on a bad request) is not.
#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("transport error talking to {endpoint}: {detail}")]
    Transport { endpoint: String, detail: String },
    #[error("server error from {endpoint} (status {status}): {detail}")]
    Server {
        endpoint: String,
        status: u16,
        detail: String,
    },
    #[error("fatal error from {endpoint}: {detail}")]
    Fatal { endpoint: String, detail: String },
    #[error("invalid response from {endpoint}: {detail}")]
    InvalidResponse { endpoint: String, detail: String },
}

impl GatewayError {
    /// Whether retrying the same request may succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            GatewayError::Transport { .. } | GatewayError::Server { .. }
        )
    }
}

/// A text-generation request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub temperature: f64,
    pub max_tokens: usize,
    /// Ask the backend for a JSON object response (structured output).
    pub structured_json: bool,
}

/// A text-generation response.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationResponse {
    pub text: String,
    /// Model identifier reported by (or configured for) the backend.
    pub model_tag: String,
}

/// Synchronous text-generation service.
pub trait GenerationService: Send + Sync {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResponse, GatewayError>;
    /// Tag used in run artifacts to identify the backing model.
    fn model_tag(&self) -> String;
}

/// Synchronous embedding service. Returns one vector per input text, all of
/// equal dimension.
pub trait EmbeddingService: Send + Sync {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, GatewayError>;
    fn model_tag(&self) -> String;
}

/// Synchronous cross-encoder scoring service: relevance of each document to
/// the query, one score per document.
pub trait ScoringService: Send + Sync {
    fn score(&self, query: &str, documents: &[String]) -> Result<Vec<f64>, GatewayError>;
    fn model_tag(&self) -> String;
}
