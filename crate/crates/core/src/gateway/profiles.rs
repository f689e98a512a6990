//! Endpoint profiles: construct concrete services from configuration.
//!
//! A profile string selects the wire format (`"ollama"`, `"vllm-score"`,
//! `"generic"`) or a deterministic mock (`"mock:<policy>"`). Offline mode
//! rejects non-mock profiles upstream in the orchestrator.

use serde::{Deserialize, Serialize};

use super::http::{generation_body, generation_text, parse_vectors, HttpEndpoint, HttpProfile};
use super::{
    EmbeddingService, GatewayError, GenerationRequest, GenerationResponse, GenerationService,
    ScoringService,
};
use crate::mocks::{
    AnswerPolicy, EmbeddingPolicy, MockContext, MockEmbeddingService, MockGenerationService,
    MockScoringService, ScoringPolicy,
};

/// One endpoint's configuration (a section of `endpoints.toml` or of the
/// main config file).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// Wire/mock profile, e.g. `"ollama"`, `"vllm-score"`, `"generic"`,
    /// `"mock:always_correct"`, `"mock:correct_on_attempt_3"`.
    pub profile: String,
    pub base_url: String,
    /// Model identifier sent to the backend and recorded in artifacts.
    pub model_tag: String,
    /// Bearer token, if the endpoint needs one.
    pub api_key: Option<String>,
    pub timeout_ms: u64,
    pub retry_count: u32,
    /// Maximum concurrent in-flight requests against this endpoint.
    pub max_inflight: usize,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            profile: "mock:always_correct".into(),
            base_url: "http://localhost:11434".into(),
            model_tag: "mock-model".into(),
            api_key: None,
            timeout_ms: 120_000,
            retry_count: 2,
            max_inflight: 4,
        }
    }
}

impl EndpointConfig {
    pub fn is_mock(&self) -> bool {
        self.profile.starts_with("mock:") || self.profile == "mock"
    }

    fn http(&self) -> HttpEndpoint {
        HttpEndpoint::new(
            &self.base_url,
            &self.model_tag,
            self.api_key.clone(),
            self.timeout_ms,
            self.retry_count,
        )
    }

    /// Model tag sanitized for use in file names.
    pub fn file_tag(&self) -> String {
        crate::util::sanitize_component(&self.model_tag)
    }
}

struct HttpGeneration {
    ep: HttpEndpoint,
    profile: HttpProfile,
    path: &'static str,
}

impl GenerationService for HttpGeneration {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResponse, GatewayError> {
        let body = generation_body(self.profile, &self.ep.model, req);
        let resp = self.ep.post_json(self.path, &body)?;
        let text = generation_text(self.profile, self.path, &resp)?;
        Ok(GenerationResponse {
            text,
            model_tag: self.ep.model.clone(),
        })
    }

    fn model_tag(&self) -> String {
        self.ep.model.clone()
    }
}

struct HttpEmbedding {
    ep: HttpEndpoint,
    profile: HttpProfile,
    path: &'static str,
    expected_dim: Option<usize>,
}

impl EmbeddingService for HttpEmbedding {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, GatewayError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let body = match self.profile {
            HttpProfile::OllamaEmbed => {
                serde_json::json!({"model": self.ep.model, "input": texts})
            }
            _ => serde_json::json!({"texts": texts}),
        };
        let field = match self.profile {
            HttpProfile::OllamaEmbed => "embeddings",
            _ => "vectors",
        };
        let resp = self.ep.post_json(self.path, &body)?;
        let vectors = parse_vectors(self.path, &resp, field, texts.len())?;
        if let Some(dim) = self.expected_dim {
            if let Some(row) = vectors.first() {
                if row.len() != dim {
                    return Err(GatewayError::Fatal {
                        endpoint: self.path.into(),
                        detail: format!("embedding dimension {} != configured {dim}", row.len()),
                    });
                }
            }
        }
        Ok(vectors)
    }

    fn model_tag(&self) -> String {
        self.ep.model.clone()
    }
}

struct HttpScoring {
    ep: HttpEndpoint,
    profile: HttpProfile,
}

impl ScoringService for HttpScoring {
    fn score(&self, query: &str, documents: &[String]) -> Result<Vec<f64>, GatewayError> {
        if documents.is_empty() {
            return Ok(Vec::new());
        }
        let body = match self.profile {
            HttpProfile::VllmScore => serde_json::json!({
                "model": self.ep.model, "text_1": query, "text_2": documents,
            }),
            _ => serde_json::json!({"query": query, "documents": documents}),
        };
        let resp = self.ep.post_json("/score", &body)?;
        let invalid = |detail: String| GatewayError::InvalidResponse {
            endpoint: "/score".into(),
            detail,
        };
        let scores: Vec<f64> = match self.profile {
            HttpProfile::VllmScore => resp
                .get("data")
                .and_then(|d| d.as_array())
                .ok_or_else(|| invalid("missing data array".into()))?
                .iter()
                .map(|row| row.get("score").and_then(|s| s.as_f64()))
                .collect::<Option<_>>()
                .ok_or_else(|| invalid("row missing numeric score".into()))?,
            _ => resp
                .get("scores")
                .and_then(|s| s.as_array())
                .ok_or_else(|| invalid("missing scores array".into()))?
                .iter()
                .map(|s| s.as_f64())
                .collect::<Option<_>>()
                .ok_or_else(|| invalid("score is not a number".into()))?,
        };
        if scores.len() != documents.len() {
            return Err(invalid(format!(
                "expected {} scores, got {}",
                documents.len(),
                scores.len()
            )));
        }
        if let Some(bad) = scores
            .iter()
            .find(|s| !(0.0..=1.0).contains(*s) || !s.is_finite())
        {
            return Err(GatewayError::Fatal {
                endpoint: "/score".into(),
                detail: format!("score {bad} outside [0,1]"),
            });
        }
        Ok(scores)
    }

    fn model_tag(&self) -> String {
        self.ep.model.clone()
    }
}

fn unknown_profile(kind: &str, profile: &str) -> GatewayError {
    GatewayError::Fatal {
        endpoint: kind.into(),
        detail: format!("unknown {kind} profile `{profile}`"),
    }
}

/// Build a generation service from config (mock context used for `mock:` profiles).
pub fn build_generation_service(
    cfg: &EndpointConfig,
    mock: &MockContext,
) -> Result<Box<dyn GenerationService>, GatewayError> {
    match cfg.profile.as_str() {
        "ollama" => Ok(Box::new(HttpGeneration {
            ep: cfg.http(),
            profile: HttpProfile::OllamaGenerate,
            path: "/api/generate",
        })),
        "generic" => Ok(Box::new(HttpGeneration {
            ep: cfg.http(),
            profile: HttpProfile::GenericGenerate,
            path: "/generate",
        })),
        p => {
            let suffix = p
                .strip_prefix("mock:")
                .ok_or_else(|| unknown_profile("generation", p))?;
            let policy =
                AnswerPolicy::parse(suffix).ok_or_else(|| unknown_profile("generation", p))?;
            let mut ctx = mock.clone();
            ctx.model_tag = cfg.model_tag.clone();
            Ok(Box::new(MockGenerationService::new(policy, ctx)))
        }
    }
}

/// Build an embedding service from config.
pub fn build_embedding_service(
    cfg: &EndpointConfig,
    mock: &MockContext,
    expected_dim: Option<usize>,
) -> Result<Box<dyn EmbeddingService>, GatewayError> {
    match cfg.profile.as_str() {
        "ollama" => Ok(Box::new(HttpEmbedding {
            ep: cfg.http(),
            profile: HttpProfile::OllamaEmbed,
            path: "/api/embed",
            expected_dim,
        })),
        "generic" => Ok(Box::new(HttpEmbedding {
            ep: cfg.http(),
            profile: HttpProfile::GenericEmbed,
            path: "/embed",
            expected_dim,
        })),
        "mock:hash_projection" | "mock:basis" => {
            let policy = if cfg.profile.ends_with("basis") {
                EmbeddingPolicy::Basis
            } else {
                EmbeddingPolicy::HashProjection
            };
            let mut ctx = mock.clone();
            ctx.model_tag = cfg.model_tag.clone();
            if let Some(dim) = expected_dim {
                ctx.embed_dim = dim;
            }
            Ok(Box::new(MockEmbeddingService::new(policy, ctx)))
        }
        p => Err(unknown_profile("embedding", p)),
    }
}

/// Build a scoring service from config.
pub fn build_scoring_service(
    cfg: &EndpointConfig,
    mock: &MockContext,
) -> Result<Box<dyn ScoringService>, GatewayError> {
    match cfg.profile.as_str() {
        "vllm-score" => Ok(Box::new(HttpScoring {
            ep: cfg.http(),
            profile: HttpProfile::VllmScore,
        })),
        "generic" => Ok(Box::new(HttpScoring {
            ep: cfg.http(),
            profile: HttpProfile::GenericScore,
        })),
        "mock:keyword_overlap" => {
            let mut ctx = mock.clone();
            ctx.model_tag = cfg.model_tag.clone();
            Ok(Box::new(MockScoringService::new(
                ScoringPolicy::KeywordOverlap,
                ctx,
            )))
        }
        p => {
            if let Some(v) = p.strip_prefix("mock:constant:") {
                let c: f64 = v.parse().map_err(|_| unknown_profile("scoring", p))?;
                let mut ctx = mock.clone();
                ctx.model_tag = cfg.model_tag.clone();
                return Ok(Box::new(MockScoringService::new(
                    ScoringPolicy::Constant(c),
                    ctx,
                )));
            }
            Err(unknown_profile("scoring", p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mock_profiles_build() {
        let mut cfg = EndpointConfig::default();
        let ctx = MockContext::default();
        cfg.profile = "mock:correct_on_attempt_3".into();
        assert!(build_generation_service(&cfg, &ctx).is_ok());
        cfg.profile = "mock:hash_projection".into();
        assert!(build_embedding_service(&cfg, &ctx, Some(16)).is_ok());
        cfg.profile = "mock:keyword_overlap".into();
        assert!(build_scoring_service(&cfg, &ctx).is_ok());
        cfg.profile = "mock:constant:0.42".into();
        let svc = build_scoring_service(&cfg, &ctx).unwrap();
        assert_eq!(svc.score("q", &["d".into()]).unwrap(), vec![0.42]);
    }

    #[test]
    fn unknown_profiles_error() {
        let cfg = EndpointConfig {
            profile: "banana".into(),
            ..Default::default()
        };
        assert!(build_generation_service(&cfg, &MockContext::default()).is_err());
        assert!(build_embedding_service(&cfg, &MockContext::default(), None).is_err());
        assert!(build_scoring_service(&cfg, &MockContext::default()).is_err());
    }

    #[test]
    fn file_tag_sanitizes() {
        let cfg = EndpointConfig {
            model_tag: "gemma2:9b".into(),
            ..Default::default()
        };
        assert_eq!(cfg.file_tag(), "gemma2-9b");
    }
}
