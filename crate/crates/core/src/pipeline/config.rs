//! Pipeline configuration: a single TOML file describing paths, model
//! endpoints and stage parameters. Every field has a default, so a missing
//! or partial file still yields a runnable, fully offline, mock-backed
//! pipeline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::FieldMap;
use crate::gateway::EndpointConfig;
use crate::retrieval::RetrievalConfig;

/// Environment variable consulted for the config path when no explicit
/// `--config` argument is given.
pub const CONFIG_ENV_VAR: &str = "OMRAG_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },
}

/// Input and output locations, relative to the working directory unless
/// absolute.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    /// Directory of `.ocd` content-dictionary files (with optional `.sts`
    /// signature files alongside).
    pub cds_dir: PathBuf,
    /// JSON filter list: `{"cds": [...], "symbols": [...]}`.
    pub filters: PathBuf,
    /// JSON array of manual correction records.
    pub corrections: PathBuf,
    /// JSON array of stopwords for the lexical retriever.
    pub stopwords: PathBuf,
    /// Benchmark problems, one JSON object per line.
    pub benchmark: PathBuf,
    /// Directory with prompt-template overrides (`baseline_template.txt`,
    /// `openmath_template.txt`, `normalize_fewshot.txt`). Unset means the
    /// compiled-in defaults.
    pub prompts_dir: Option<PathBuf>,
    /// Where all stage artifacts are written.
    pub out_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            cds_dir: "assets/cds".into(),
            filters: "assets/filters.json".into(),
            corrections: "assets/corrections.json".into(),
            stopwords: "assets/stopwords.json".into(),
            benchmark: "assets/released/math500.jsonl".into(),
            prompts_dir: None,
            out_dir: "out".into(),
        }
    }
}

/// The three model services behind the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointsConfig {
    pub generation: EndpointConfig,
    pub embedding: EndpointConfig,
    pub scoring: EndpointConfig,
}

impl Default for EndpointsConfig {
    fn default() -> Self {
        let generation = EndpointConfig::default();
        let embedding = EndpointConfig {
            profile: "mock:hash_projection".into(),
            model_tag: "mock-embed".into(),
            ..EndpointConfig::default()
        };
        let scoring = EndpointConfig {
            profile: "mock:keyword_overlap".into(),
            model_tag: "mock-scorer".into(),
            ..EndpointConfig::default()
        };
        EndpointsConfig {
            generation,
            embedding,
            scoring,
        }
    }
}

/// Parameters of the notation-normalization stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeSection {
    /// Model attempts per field before giving up (online mode only).
    pub retry_limit: u32,
    /// Concurrent in-flight normalization calls.
    pub max_inflight: usize,
}

impl Default for NormalizeSection {
    fn default() -> Self {
        NormalizeSection {
            retry_limit: 2,
            max_inflight: 4,
        }
    }
}

/// Parameters of the hybrid retrieval stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalSection {
    /// Fused candidates kept per problem.
    pub top_n: usize,
    /// Reciprocal-rank-fusion constant.
    pub rrf_k: f64,
    pub weight_bm25: f64,
    pub weight_dense: f64,
    /// Expected embedding dimension (also the mock embedder's dimension).
    pub embed_dim: usize,
}

impl Default for RetrievalSection {
    fn default() -> Self {
        let base = RetrievalConfig::default();
        RetrievalSection {
            top_n: base.top_n,
            rrf_k: base.rrf_k,
            weight_bm25: base.weight_bm25,
            weight_dense: base.weight_dense,
            embed_dim: 64,
        }
    }
}

impl RetrievalSection {
    pub fn to_config(&self) -> RetrievalConfig {
        RetrievalConfig {
            top_n: self.top_n,
            rrf_k: self.rrf_k,
            weight_bm25: self.weight_bm25,
            weight_dense: self.weight_dense,
        }
    }
}

/// Parameters of the inference stage. The full cross product of
/// `conditions x modes x thresholds` is run, one record file each.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct InferenceSection {
    /// Reranker-score cutoffs; a problem participates when its best
    /// candidate score reaches the cutoff.
    pub thresholds: Vec<f64>,
    /// Any of `"greedy"`, `"bestofn"`.
    pub modes: Vec<String>,
    /// Any of `"baseline"`, `"openmath"`.
    pub conditions: Vec<String>,
    /// Attempt budget for best-of-n sampling.
    pub max_attempts: u32,
    pub temperature_greedy: f64,
    pub temperature_bestofn: f64,
    pub max_tokens: usize,
}

impl Default for InferenceSection {
    fn default() -> Self {
        InferenceSection {
            thresholds: vec![0.0, 0.1, 0.3, 0.5, 0.7, 0.9],
            modes: vec!["greedy".into(), "bestofn".into()],
            conditions: vec!["baseline".into(), "openmath".into()],
            max_attempts: 5,
            temperature_greedy: 0.0,
            temperature_bestofn: 0.6,
            max_tokens: 2048,
        }
    }
}

/// Top-level pipeline configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Never touch the network: every endpoint must use a `mock:` profile,
    /// and normalization runs pattern + corrections only.
    pub offline: bool,
    /// Reuse completed stage outputs whose input fingerprints still match.
    pub resume: bool,
    /// Seed for the deterministic mock services.
    pub mock_seed: u64,
    pub paths: PathsConfig,
    /// Field-name mapping for the benchmark JSONL.
    pub benchmark: FieldMap,
    pub endpoints: EndpointsConfig,
    pub normalize: NormalizeSection,
    pub retrieval: RetrievalSection,
    pub inference: InferenceSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            offline: true,
            resume: true,
            mock_seed: 17,
            paths: PathsConfig::default(),
            benchmark: FieldMap::default(),
            endpoints: EndpointsConfig::default(),
            normalize: NormalizeSection::default(),
            retrieval: RetrievalSection::default(),
            inference: InferenceSection::default(),
        }
    }
}

impl PipelineConfig {
    /// Parse a TOML config file.
    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source: Box::new(source),
        })
    }

    /// Resolve the effective config: an explicit path wins, then the
    /// `OMRAG_CONFIG` environment variable, then built-in defaults. Returns
    /// the config and the file it came from, if any.
    pub fn resolve(
        explicit: Option<&Path>,
    ) -> Result<(PipelineConfig, Option<PathBuf>), ConfigError> {
        if let Some(path) = explicit {
            return Ok((Self::load(path)?, Some(path.to_path_buf())));
        }
        if let Ok(env_path) = std::env::var(CONFIG_ENV_VAR) {
            if !env_path.is_empty() {
                let path = PathBuf::from(env_path);
                return Ok((Self::load(&path)?, Some(path)));
            }
        }
        Ok((PipelineConfig::default(), None))
    }
}
