//! End-to-end orchestration: configuration, a resumable per-stage manifest,
//! and the stage driver that wires the library modules into a directory of
//! fingerprinted artifacts.

mod config;
mod manifest;
mod stages;

pub use config::{
    ConfigError, EndpointsConfig, InferenceSection, NormalizeSection, PathsConfig, PipelineConfig,
    RetrievalSection, CONFIG_ENV_VAR,
};
pub use manifest::{RunManifest, StageRecord, MANIFEST_FILE};
pub use stages::{
    Pipeline, PipelineError, Stage, CANDIDATES_FILE, CONCEPTS_FILE, CONCEPT_EMBEDDINGS_FILE,
    KB_EMBEDDINGS_FILE, KB_FILE, KB_NORMALIZED_FILE, NORMALIZATION_REPORT_FILE, REPORTS_DIR,
    RUNS_DIR, SCORES_FILE, SCORES_PARTIAL_FILE, SELECTION_FILE,
};
