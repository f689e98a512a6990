//! Stage driver: runs the pipeline stages in order, fingerprints each
//! stage's inputs so unchanged stages are skipped on re-invocation, and
//! resumes interrupted scoring and inference runs without duplicating
//! records.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::{load_benchmark, BenchError, Problem};
use crate::concepts::{extract_concepts, ConceptError, ConceptSet, EXTRACTOR_PROMPT};
use crate::gateway::{
    build_embedding_service, build_generation_service, build_scoring_service, EmbeddingService,
    EndpointConfig, GatewayError,
};
use crate::inference::{
    build_prompt, run_file_name, run_inference, Condition, InferenceConfig, InferenceError,
    InferenceMode, InferenceRecord, PromptTemplates,
};
use crate::kb::{build_kb, description_card, FilterList, KbError, KnowledgeBase};
use crate::metrics::{
    build_metrics_report, coverage_report, emit_report, EvaluationReport, MetricsError,
};
use crate::mocks::MockContext;
use crate::normalize::{normalize_kb, Corrections, NormalizeError, NormalizeOptions};
use crate::rerank::{
    filter_problems_by_threshold, score_candidates, select_symbols, RerankError, ScoredPair,
    SelectionResult,
};
use crate::retrieval::{
    load_stopwords, retrieve_top, tokenize, Bm25Index, Bm25Params, EmbedError, EmbeddingMatrix,
    RankedCandidate,
};
use crate::util::{self, JsonlAppender, UtilError};

use super::config::{ConfigError, PipelineConfig};
use super::manifest::RunManifest;

// Artifact names inside the output directory.
pub const KB_FILE: &str = "kb.json";
pub const KB_NORMALIZED_FILE: &str = "kb.normalized.json";
pub const NORMALIZATION_REPORT_FILE: &str = "normalization_report.json";
pub const CONCEPTS_FILE: &str = "concepts.json";
pub const KB_EMBEDDINGS_FILE: &str = "openmath-embeddings.bin";
pub const CONCEPT_EMBEDDINGS_FILE: &str = "math500-concepts-embeddings.bin";
pub const CANDIDATES_FILE: &str = "candidates.json";
pub const SCORES_FILE: &str = "scores.json";
pub const SCORES_PARTIAL_FILE: &str = "scores.partial.jsonl";
pub const SELECTION_FILE: &str = "selection.json";
pub const RUNS_DIR: &str = "runs";
pub const REPORTS_DIR: &str = "reports";

/// Texts per embedding-service call.
const EMBED_BATCH: usize = 64;

/// Fallback few-shot conversion prompt (compiled in).
const DEFAULT_NORMALIZE_FEWSHOT: &str =
    include_str!("../../../../assets/prompts/normalize_fewshot.txt");

/// The pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    BuildKb,
    Normalize,
    ExtractConcepts,
    Embed,
    Retrieve,
    Rerank,
    Select,
    Infer,
    Evaluate,
}

impl Stage {
    pub const ORDER: [Stage; 9] = [
        Stage::BuildKb,
        Stage::Normalize,
        Stage::ExtractConcepts,
        Stage::Embed,
        Stage::Retrieve,
        Stage::Rerank,
        Stage::Select,
        Stage::Infer,
        Stage::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::BuildKb => "build-kb",
            Stage::Normalize => "normalize",
            Stage::ExtractConcepts => "extract-concepts",
            Stage::Embed => "embed",
            Stage::Retrieve => "retrieve",
            Stage::Rerank => "rerank",
            Stage::Select => "select",
            Stage::Infer => "infer",
            Stage::Evaluate => "evaluate",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ORDER.iter().copied().find(|st| st.name() == s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    ConfigFile(#[from] ConfigError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Concept(#[from] ConceptError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Rerank(#[from] RerankError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Util(#[from] UtilError),
    #[error("missing artifact {path}: run the `{stage}` stage first")]
    MissingArtifact { path: String, stage: &'static str },
    #[error("inconsistent stage data: {0}")]
    Invalid(String),
}

/// Per-problem batch of reranker scores, the unit of incremental progress
/// in the rerank stage (one JSONL line each, flushed after every problem).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScoredBatch {
    problem_id: String,
    pairs: Vec<ScoredPair>,
}

fn json_fp<T: Serialize>(value: &T) -> String {
    util::sha256_hex(
        serde_json::to_string(value)
            .expect("serializable value")
            .as_bytes(),
    )
}

fn endpoint_identity(ep: &EndpointConfig) -> String {
    format!("{}::{}", ep.profile, ep.model_tag)
}

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Util(UtilError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Read a JSONL file, tolerating a torn final line from an interrupted
/// writer: complete leading records are returned and the file is truncated
/// to drop the torn tail, so appending resumes cleanly. A missing file is
/// an empty record set.
fn sanitize_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let mut text = String::new();
    match std::fs::File::open(path) {
        Ok(mut f) => {
            f.read_to_string(&mut text).map_err(|e| io_err(path, e))?;
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path, e)),
    }
    let mut records = Vec::new();
    let mut consumed = 0usize;
    let mut keep = text.len();
    for segment in text.split_inclusive('\n') {
        let line = segment.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            consumed += segment.len();
            continue;
        }
        match serde_json::from_str::<T>(line) {
            Ok(record) => {
                records.push(record);
                consumed += segment.len();
            }
            Err(_) => {
                keep = consumed;
                break;
            }
        }
    }
    if keep < text.len() {
        log::warn!(
            "{}: dropping torn record after byte {keep} (interrupted write)",
            path.display()
        );
        let f = std::fs::OpenOptions::new()
            .write(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        f.set_len(keep as u64).map_err(|e| io_err(path, e))?;
    }
    Ok(records)
}

/// Embed `(id, text)` items in batches into a matrix tagged with the
/// service's model tag.
fn embed_matrix(
    svc: &dyn EmbeddingService,
    items: &[(String, String)],
) -> Result<EmbeddingMatrix, PipelineError> {
    let mut matrix = EmbeddingMatrix::new(&svc.model_tag());
    for chunk in items.chunks(EMBED_BATCH) {
        let texts: Vec<String> = chunk.iter().map(|(_, t)| t.clone()).collect();
        let vectors = svc.embed(&texts)?;
        if vectors.len() != chunk.len() {
            return Err(PipelineError::Invalid(format!(
                "embedding service returned {} vectors for {} inputs",
                vectors.len(),
                chunk.len()
            )));
        }
        for ((id, _), v) in chunk.iter().zip(vectors) {
            matrix.push_row(id, &v)?;
        }
    }
    Ok(matrix)
}

/// Group flat candidate records by problem in first-appearance order, each
/// group sorted by fused rank.
fn group_candidates(
    candidates: Vec<RankedCandidate>,
) -> (Vec<String>, BTreeMap<String, Vec<RankedCandidate>>) {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<RankedCandidate>> = BTreeMap::new();
    for c in candidates {
        if !groups.contains_key(&c.problem_id) {
            order.push(c.problem_id.clone());
        }
        groups.entry(c.problem_id.clone()).or_default().push(c);
    }
    for g in groups.values_mut() {
        g.sort_by_key(|c| c.rrf_rank);
    }
    (order, groups)
}

/// Orchestrates the stages over one output directory.
pub struct Pipeline {
    cfg: PipelineConfig,
    out_dir: PathBuf,
    manifest: RunManifest,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Pipeline, PipelineError> {
        if cfg.offline {
            for (name, ep) in [
                ("generation", &cfg.endpoints.generation),
                ("embedding", &cfg.endpoints.embedding),
                ("scoring", &cfg.endpoints.scoring),
            ] {
                if !ep.is_mock() {
                    return Err(PipelineError::Config(format!(
                        "offline mode requires a mock profile for the {name} endpoint, \
                         got `{}`",
                        ep.profile
                    )));
                }
            }
        }
        let out_dir = cfg.paths.out_dir.clone();
        std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
        let run_id = json_fp(&cfg)[..12].to_string();
        let endpoint_tags: BTreeMap<String, String> = [
            (
                "generation".to_string(),
                cfg.endpoints.generation.model_tag.clone(),
            ),
            (
                "embedding".to_string(),
                cfg.endpoints.embedding.model_tag.clone(),
            ),
            (
                "scoring".to_string(),
                cfg.endpoints.scoring.model_tag.clone(),
            ),
        ]
        .into_iter()
        .collect();
        let manifest = RunManifest::load_or_new(&out_dir, &run_id, endpoint_tags);
        Ok(Pipeline {
            cfg,
            out_dir,
            manifest,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Run the requested stages in pipeline order, skipping stages whose
    /// fingerprints are current (when resume is enabled).
    pub fn run(&mut self, stages: &[Stage]) -> Result<(), PipelineError> {
        for stage in Stage::ORDER.iter().copied().filter(|s| stages.contains(s)) {
            let fp = self.stage_fingerprint(stage)?;
            if self.cfg.resume && self.manifest.is_current(stage.name(), &fp, &self.out_dir) {
                log::info!("stage {}: up to date, skipping", stage.name());
                continue;
            }
            log::info!("stage {}: running", stage.name());
            self.manifest.invalidate(stage.name());
            self.manifest.save(&self.out_dir)?;
            let started = Instant::now();
            let outputs = self.execute(stage, &fp)?;
            self.manifest.record(stage.name(), &fp, outputs);
            self.manifest.save(&self.out_dir)?;
            log::info!(
                "stage {}: done in {:.1}s",
                stage.name(),
                started.elapsed().as_secs_f64()
            );
        }
        Ok(())
    }

    /// All nine stages.
    pub fn run_all(&mut self) -> Result<(), PipelineError> {
        self.run(&Stage::ORDER)
    }

    /// Inference plus evaluation only (ablation over existing artifacts).
    pub fn ablate(&mut self) -> Result<(), PipelineError> {
        self.run(&[Stage::Infer, Stage::Evaluate])
    }

    fn execute(&self, stage: Stage, fingerprint: &str) -> Result<Vec<String>, PipelineError> {
        match stage {
            Stage::BuildKb => self.stage_build_kb(),
            Stage::Normalize => self.stage_normalize(),
            Stage::ExtractConcepts => self.stage_extract_concepts(),
            Stage::Embed => self.stage_embed(),
            Stage::Retrieve => self.stage_retrieve(),
            Stage::Rerank => self.stage_rerank(fingerprint),
            Stage::Select => self.stage_select(),
            Stage::Infer => self.stage_infer(fingerprint),
            Stage::Evaluate => self.stage_evaluate(),
        }
    }

    // -- fingerprints --------------------------------------------------

    fn input_fp(&self, path: &Path) -> Result<String, PipelineError> {
        Ok(util::fingerprint_file(path)?)
    }

    /// Path of an artifact a previous stage must have produced.
    fn artifact_path(&self, name: &str, produced_by: Stage) -> Result<PathBuf, PipelineError> {
        let path = self.out_dir.join(name);
        if !path.exists() {
            return Err(PipelineError::MissingArtifact {
                path: path.display().to_string(),
                stage: produced_by.name(),
            });
        }
        Ok(path)
    }

    fn artifact_fp(&self, name: &str, produced_by: Stage) -> Result<String, PipelineError> {
        let path = self.artifact_path(name, produced_by)?;
        Ok(util::fingerprint_file(&path)?)
    }

    fn push_endpoint(&self, parts: &mut Vec<String>, ep: &EndpointConfig) {
        parts.push(endpoint_identity(ep));
        if ep.is_mock() {
            parts.push(format!("seed:{}", self.cfg.mock_seed));
        }
    }

    fn stage_fingerprint(&self, stage: Stage) -> Result<String, PipelineError> {
        let cfg = &self.cfg;
        let mut parts: Vec<String> = vec![format!("{}/v1", stage.name())];
        match stage {
            Stage::BuildKb => {
                parts.push(util::fingerprint_dir(&cfg.paths.cds_dir)?);
                parts.push(self.input_fp(&cfg.paths.filters)?);
            }
            Stage::Normalize => {
                parts.push(self.artifact_fp(KB_FILE, Stage::BuildKb)?);
                if cfg.paths.corrections.exists() {
                    parts.push(self.input_fp(&cfg.paths.corrections)?);
                } else {
                    parts.push("no-corrections".into());
                }
                parts.push(json_fp(&cfg.normalize));
                parts.push(util::sha256_hex(self.fewshot_template()?.as_bytes()));
                if cfg.offline {
                    parts.push("offline".into());
                } else {
                    self.push_endpoint(&mut parts, &cfg.endpoints.generation);
                }
            }
            Stage::ExtractConcepts => {
                parts.push(self.input_fp(&cfg.paths.benchmark)?);
                parts.push(json_fp(&cfg.benchmark));
                parts.push(util::sha256_hex(EXTRACTOR_PROMPT.as_bytes()));
                self.push_endpoint(&mut parts, &cfg.endpoints.generation);
            }
            Stage::Embed => {
                parts.push(self.artifact_fp(KB_NORMALIZED_FILE, Stage::Normalize)?);
                parts.push(self.artifact_fp(CONCEPTS_FILE, Stage::ExtractConcepts)?);
                parts.push(format!("dim:{}", cfg.retrieval.embed_dim));
                self.push_endpoint(&mut parts, &cfg.endpoints.embedding);
            }
            Stage::Retrieve => {
                parts.push(self.artifact_fp(KB_EMBEDDINGS_FILE, Stage::Embed)?);
                parts.push(self.artifact_fp(CONCEPT_EMBEDDINGS_FILE, Stage::Embed)?);
                parts.push(self.artifact_fp(KB_NORMALIZED_FILE, Stage::Normalize)?);
                parts.push(self.artifact_fp(CONCEPTS_FILE, Stage::ExtractConcepts)?);
                parts.push(self.input_fp(&cfg.paths.stopwords)?);
                parts.push(json_fp(&cfg.retrieval));
            }
            Stage::Rerank => {
                parts.push(self.artifact_fp(CANDIDATES_FILE, Stage::Retrieve)?);
                parts.push(self.artifact_fp(KB_NORMALIZED_FILE, Stage::Normalize)?);
                parts.push(self.input_fp(&cfg.paths.benchmark)?);
                parts.push(json_fp(&cfg.benchmark));
                self.push_endpoint(&mut parts, &cfg.endpoints.scoring);
            }
            Stage::Select => {
                parts.push(self.artifact_fp(SCORES_FILE, Stage::Rerank)?);
                parts.push(self.artifact_fp(CANDIDATES_FILE, Stage::Retrieve)?);
            }
            Stage::Infer => {
                parts.push(self.artifact_fp(SELECTION_FILE, Stage::Select)?);
                parts.push(self.artifact_fp(SCORES_FILE, Stage::Rerank)?);
                parts.push(self.artifact_fp(KB_NORMALIZED_FILE, Stage::Normalize)?);
                parts.push(self.input_fp(&cfg.paths.benchmark)?);
                parts.push(json_fp(&cfg.benchmark));
                let templates = self.prompt_templates()?;
                parts.push(util::sha256_hex(templates.baseline.as_bytes()));
                parts.push(util::sha256_hex(templates.openmath.as_bytes()));
                parts.push(json_fp(&cfg.inference));
                self.push_endpoint(&mut parts, &cfg.endpoints.generation);
            }
            Stage::Evaluate => {
                for path in self.list_run_files()? {
                    parts.push(format!(
                        "{}:{}",
                        path.file_name()
                            .map(|n| n.to_string_lossy().into_owned())
                            .unwrap_or_default(),
                        util::fingerprint_file(&path)?
                    ));
                }
                parts.push(self.artifact_fp(SCORES_FILE, Stage::Rerank)?);
                parts.push(self.input_fp(&cfg.paths.benchmark)?);
                parts.push(json_fp(&cfg.benchmark));
            }
        }
        let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
        Ok(util::combine_fingerprints(&refs))
    }

    // -- shared loaders ------------------------------------------------

    fn load_problems(&self) -> Result<Vec<Problem>, PipelineError> {
        Ok(load_benchmark(
            &self.cfg.paths.benchmark,
            &self.cfg.benchmark,
        )?)
    }

    fn mock_context(&self, problems: Option<&[Problem]>) -> MockContext {
        let mut ctx = MockContext {
            seed: self.cfg.mock_seed,
            embed_dim: self.cfg.retrieval.embed_dim,
            ..MockContext::default()
        };
        if let Some(ps) = problems {
            ctx.ground_truth = ps
                .iter()
                .map(|p| (p.statement.clone(), p.ground_truth.clone()))
                .collect();
        }
        ctx
    }

    fn prompt_templates(&self) -> Result<PromptTemplates, PipelineError> {
        match &self.cfg.paths.prompts_dir {
            Some(dir) => PromptTemplates::load_from_dir(dir).map_err(|source| {
                PipelineError::Config(format!("prompt templates in {}: {source}", dir.display()))
            }),
            None => Ok(PromptTemplates::default()),
        }
    }

    fn fewshot_template(&self) -> Result<String, PipelineError> {
        if let Some(dir) = &self.cfg.paths.prompts_dir {
            let path = dir.join("normalize_fewshot.txt");
            if path.exists() {
                return std::fs::read_to_string(&path).map_err(|e| io_err(&path, e));
            }
        }
        Ok(DEFAULT_NORMALIZE_FEWSHOT.to_string())
    }

    fn list_run_files(&self) -> Result<Vec<PathBuf>, PipelineError> {
        let dir = self.out_dir.join(RUNS_DIR);
        if !dir.exists() {
            return Err(PipelineError::MissingArtifact {
                path: dir.display().to_string(),
                stage: Stage::Infer.name(),
            });
        }
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
            .map_err(|e| io_err(&dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(PipelineError::MissingArtifact {
                path: dir.join("*.jsonl").display().to_string(),
                stage: Stage::Infer.name(),
            });
        }
        Ok(files)
    }

    /// Prepare a stage that accumulates incremental files. When a marker
    /// from an interrupted run carries the same fingerprint (and resume is
    /// on), existing partial files are kept and resumed; otherwise they are
    /// removed for a clean re-run. Returns whether partials were kept.
    fn stage_guard(
        &self,
        stage: Stage,
        fingerprint: &str,
        partial_files: &[PathBuf],
    ) -> Result<bool, PipelineError> {
        let marker_dir = self.out_dir.join(".inprogress");
        std::fs::create_dir_all(&marker_dir).map_err(|e| io_err(&marker_dir, e))?;
        let marker = marker_dir.join(stage.name());
        let marker_fp = std::fs::read_to_string(&marker).unwrap_or_default();
        let resume = self.cfg.resume && marker_fp.trim() == fingerprint;
        if !resume {
            for path in partial_files {
                if path.exists() {
                    std::fs::remove_file(path).map_err(|e| io_err(path, e))?;
                }
            }
            std::fs::write(&marker, fingerprint).map_err(|e| io_err(&marker, e))?;
        }
        Ok(resume)
    }

    // -- stages ----------------------------------------------------------

    fn stage_build_kb(&self) -> Result<Vec<String>, PipelineError> {
        let filters = FilterList::load(&self.cfg.paths.filters)?;
        let kb = build_kb(&self.cfg.paths.cds_dir, &filters)?;
        log::info!(
            "knowledge base: {} dictionaries, {} symbols parsed, {} filtered, {} indexed",
            kb.counts.cds,
            kb.counts.symbols,
            kb.counts.filtered,
            kb.counts.indexed
        );
        kb.save(&self.out_dir.join(KB_FILE))?;
        Ok(vec![KB_FILE.to_string()])
    }

    fn stage_normalize(&self) -> Result<Vec<String>, PipelineError> {
        let kb = KnowledgeBase::load(&self.artifact_path(KB_FILE, Stage::BuildKb)?)?;
        let corrections = if self.cfg.paths.corrections.exists() {
            Corrections::load(&self.cfg.paths.corrections)?
        } else {
            log::info!(
                "no corrections file at {}; continuing without manual corrections",
                self.cfg.paths.corrections.display()
            );
            Corrections::from_records(Vec::new())?
        };
        let opts = NormalizeOptions {
            offline: self.cfg.offline,
            retry_limit: self.cfg.normalize.retry_limit,
            fewshot_template: self.fewshot_template()?,
            max_inflight: self.cfg.normalize.max_inflight,
        };
        let (normalized, report) = if self.cfg.offline {
            normalize_kb(&kb, &corrections, None, &opts)?
        } else {
            let ctx = self.mock_context(None);
            let svc = build_generation_service(&self.cfg.endpoints.generation, &ctx)?;
            normalize_kb(&kb, &corrections, Some(svc.as_ref()), &opts)?
        };
        log::info!(
            "normalization: {:.1}% coverage ({} of {} fields valid)",
            report.coverage * 100.0,
            report.fields_valid,
            report.fields_total
        );
        normalized.save(&self.out_dir.join(KB_NORMALIZED_FILE))?;
        util::write_json(&self.out_dir.join(NORMALIZATION_REPORT_FILE), &report)?;
        Ok(vec![
            KB_NORMALIZED_FILE.to_string(),
            NORMALIZATION_REPORT_FILE.to_string(),
        ])
    }

    fn stage_extract_concepts(&self) -> Result<Vec<String>, PipelineError> {
        let problems = self.load_problems()?;
        let ctx = self.mock_context(Some(&problems));
        let svc = build_generation_service(&self.cfg.endpoints.generation, &ctx)?;
        let max_inflight = self.cfg.endpoints.generation.max_inflight.max(1);
        let results = util::bounded_parallel_map(problems, max_inflight, |p| {
            extract_concepts(&p, svc.as_ref())
        });
        let mut sets = Vec::with_capacity(results.len());
        for r in results {
            sets.push(r?);
        }
        let in_range = sets.iter().filter(|s| s.in_target_range).count();
        log::info!(
            "concepts: {} problems, {} in target range",
            sets.len(),
            in_range
        );
        util::write_json(&self.out_dir.join(CONCEPTS_FILE), &sets)?;
        Ok(vec![CONCEPTS_FILE.to_string()])
    }

    fn stage_embed(&self) -> Result<Vec<String>, PipelineError> {
        let kb = KnowledgeBase::load(&self.artifact_path(KB_NORMALIZED_FILE, Stage::Normalize)?)?;
        let concepts: Vec<ConceptSet> =
            util::read_json(&self.artifact_path(CONCEPTS_FILE, Stage::ExtractConcepts)?)?;
        let ctx = self.mock_context(None);
        let svc = build_embedding_service(
            &self.cfg.endpoints.embedding,
            &ctx,
            Some(self.cfg.retrieval.embed_dim),
        )?;

        let symbol_texts: Vec<(String, String)> = kb
            .symbols
            .iter()
            .map(|e| (e.symbol_id.clone(), description_card(e)))
            .collect();
        let kb_matrix = embed_matrix(svc.as_ref(), &symbol_texts)?;
        kb_matrix.save(&self.out_dir.join(KB_EMBEDDINGS_FILE))?;

        let concept_texts: Vec<(String, String)> = concepts
            .iter()
            .map(|c| (c.problem_id.clone(), c.concepts.join(" ")))
            .collect();
        let concept_matrix = embed_matrix(svc.as_ref(), &concept_texts)?;
        concept_matrix.save(&self.out_dir.join(CONCEPT_EMBEDDINGS_FILE))?;

        log::info!(
            "embeddings: {} symbol rows, {} concept rows, {} dims",
            kb_matrix.rows(),
            concept_matrix.rows(),
            kb_matrix.cols()
        );
        // The sidecars are part of the artifact.
        let kb_sidecar = Path::new(KB_EMBEDDINGS_FILE).with_extension("json");
        let concept_sidecar = Path::new(CONCEPT_EMBEDDINGS_FILE).with_extension("json");
        Ok(vec![
            KB_EMBEDDINGS_FILE.to_string(),
            kb_sidecar.to_string_lossy().into_owned(),
            CONCEPT_EMBEDDINGS_FILE.to_string(),
            concept_sidecar.to_string_lossy().into_owned(),
        ])
    }

    fn stage_retrieve(&self) -> Result<Vec<String>, PipelineError> {
        let stopwords = load_stopwords(&self.cfg.paths.stopwords)?;
        let kb = KnowledgeBase::load(&self.artifact_path(KB_NORMALIZED_FILE, Stage::Normalize)?)?;
        let concepts: Vec<ConceptSet> =
            util::read_json(&self.artifact_path(CONCEPTS_FILE, Stage::ExtractConcepts)?)?;
        let kb_matrix =
            EmbeddingMatrix::load(&self.artifact_path(KB_EMBEDDINGS_FILE, Stage::Embed)?)?;
        let concept_matrix =
            EmbeddingMatrix::load(&self.artifact_path(CONCEPT_EMBEDDINGS_FILE, Stage::Embed)?)?;

        let docs: Vec<(String, Vec<String>)> = kb
            .symbols
            .iter()
            .map(|e| {
                (
                    e.symbol_id.clone(),
                    tokenize(&description_card(e), &stopwords),
                )
            })
            .collect();
        let index = Bm25Index::build(&docs, Bm25Params::default());
        let rcfg = self.cfg.retrieval.to_config();

        let mut candidates: Vec<RankedCandidate> = Vec::new();
        for set in &concepts {
            let query_tokens = tokenize(&set.concepts.join(" "), &stopwords);
            let query_embedding = concept_matrix.row_for(&set.problem_id).ok_or_else(|| {
                PipelineError::MissingArtifact {
                    path: format!(
                        "{} (row for problem {})",
                        CONCEPT_EMBEDDINGS_FILE, set.problem_id
                    ),
                    stage: Stage::Embed.name(),
                }
            })?;
            candidates.extend(retrieve_top(
                &set.problem_id,
                &query_tokens,
                query_embedding,
                &index,
                &kb_matrix,
                &rcfg,
            ));
        }
        log::info!(
            "retrieval: {} candidates over {} problems",
            candidates.len(),
            concepts.len()
        );
        util::write_json(&self.out_dir.join(CANDIDATES_FILE), &candidates)?;
        Ok(vec![CANDIDATES_FILE.to_string()])
    }

    fn stage_rerank(&self, fingerprint: &str) -> Result<Vec<String>, PipelineError> {
        let candidates: Vec<RankedCandidate> =
            util::read_json(&self.artifact_path(CANDIDATES_FILE, Stage::Retrieve)?)?;
        let kb = KnowledgeBase::load(&self.artifact_path(KB_NORMALIZED_FILE, Stage::Normalize)?)?;
        let problems = self.load_problems()?;
        let statement_of: BTreeMap<&str, &str> = problems
            .iter()
            .map(|p| (p.problem_id.as_str(), p.statement.as_str()))
            .collect();
        let (order, groups) = group_candidates(candidates);

        let partial_path = self.out_dir.join(SCORES_PARTIAL_FILE);
        self.stage_guard(
            Stage::Rerank,
            fingerprint,
            std::slice::from_ref(&partial_path),
        )?;
        let done: Vec<ScoredBatch> = sanitize_jsonl(&partial_path)?;
        let mut done_ids: BTreeSet<String> = done.iter().map(|b| b.problem_id.clone()).collect();

        let ctx = self.mock_context(Some(&problems));
        let svc = build_scoring_service(&self.cfg.endpoints.scoring, &ctx)?;
        let mut appender = JsonlAppender::open(&partial_path)?;
        for pid in &order {
            if done_ids.contains(pid) {
                continue;
            }
            let group = &groups[pid];
            let statement = statement_of.get(pid.as_str()).ok_or_else(|| {
                PipelineError::Invalid(format!("candidate problem {pid} not in the benchmark"))
            })?;
            let documents: Vec<String> = group
                .iter()
                .map(|c| {
                    kb.get(&c.symbol_id).map(description_card).ok_or_else(|| {
                        PipelineError::Invalid(format!(
                            "candidate symbol {} missing from the knowledge base",
                            c.symbol_id
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
            let pairs = score_candidates(statement, group, &documents, svc.as_ref())?;
            appender.append(&ScoredBatch {
                problem_id: pid.clone(),
                pairs,
            })?;
            done_ids.insert(pid.clone());
        }
        drop(appender);

        // All problems scored: flatten in candidate order and finalize.
        let batches: Vec<ScoredBatch> = sanitize_jsonl(&partial_path)?;
        let by_id: BTreeMap<String, Vec<ScoredPair>> = batches
            .into_iter()
            .map(|b| (b.problem_id, b.pairs))
            .collect();
        let mut flat: Vec<ScoredPair> = Vec::new();
        for pid in &order {
            let pairs = by_id.get(pid).ok_or_else(|| {
                PipelineError::Invalid(format!("problem {pid} missing from scored batches"))
            })?;
            flat.extend(pairs.iter().cloned());
        }
        log::info!(
            "rerank: {} scored pairs over {} problems",
            flat.len(),
            order.len()
        );
        util::write_json(&self.out_dir.join(SCORES_FILE), &flat)?;
        let _ = std::fs::remove_file(&partial_path);
        Ok(vec![SCORES_FILE.to_string()])
    }

    fn stage_select(&self) -> Result<Vec<String>, PipelineError> {
        let candidates: Vec<RankedCandidate> =
            util::read_json(&self.artifact_path(CANDIDATES_FILE, Stage::Retrieve)?)?;
        let scores: Vec<ScoredPair> =
            util::read_json(&self.artifact_path(SCORES_FILE, Stage::Rerank)?)?;
        let (order, groups) = group_candidates(candidates);
        let mut score_groups: BTreeMap<&str, Vec<ScoredPair>> = BTreeMap::new();
        for pair in &scores {
            score_groups
                .entry(pair.problem_id.as_str())
                .or_default()
                .push(pair.clone());
        }
        let mut selections: Vec<SelectionResult> = Vec::new();
        for pid in &order {
            let rrf_order: Vec<String> = groups[pid].iter().map(|c| c.symbol_id.clone()).collect();
            match score_groups.get(pid.as_str()) {
                Some(pairs) if !pairs.is_empty() => {
                    selections.push(select_symbols(pairs, &rrf_order));
                }
                _ => {
                    log::warn!("problem {pid} has no scored candidates; no selection");
                }
            }
        }
        log::info!("selection: {} problems", selections.len());
        util::write_json(&self.out_dir.join(SELECTION_FILE), &selections)?;
        Ok(vec![SELECTION_FILE.to_string()])
    }

    fn stage_infer(&self, fingerprint: &str) -> Result<Vec<String>, PipelineError> {
        let problems = self.load_problems()?;
        let problem_of: BTreeMap<&str, &Problem> = problems
            .iter()
            .map(|p| (p.problem_id.as_str(), p))
            .collect();
        let ordered_ids: Vec<String> = problems.iter().map(|p| p.problem_id.clone()).collect();
        let kb = KnowledgeBase::load(&self.artifact_path(KB_NORMALIZED_FILE, Stage::Normalize)?)?;
        let selections: Vec<SelectionResult> =
            util::read_json(&self.artifact_path(SELECTION_FILE, Stage::Select)?)?;
        let selection_of: BTreeMap<&str, &SelectionResult> = selections
            .iter()
            .map(|s| (s.problem_id.as_str(), s))
            .collect();
        let scores: Vec<ScoredPair> =
            util::read_json(&self.artifact_path(SCORES_FILE, Stage::Rerank)?)?;
        let templates = self.prompt_templates()?;
        let sec = &self.cfg.inference;

        let mut conditions: Vec<Condition> = Vec::new();
        for name in &sec.conditions {
            match name.as_str() {
                "baseline" => conditions.push(Condition::Baseline),
                "openmath" => conditions.push(Condition::Openmath),
                other => {
                    return Err(PipelineError::Config(format!(
                        "unknown inference condition `{other}` (expected `baseline` or `openmath`)"
                    )))
                }
            }
        }
        let mut modes: Vec<InferenceMode> = Vec::new();
        for name in &sec.modes {
            modes.push(InferenceMode::parse(name).ok_or_else(|| {
                PipelineError::Config(format!(
                    "unknown inference mode `{name}` (expected `greedy` or `bestofn`)"
                ))
            })?);
        }

        let runs_dir = self.out_dir.join(RUNS_DIR);
        std::fs::create_dir_all(&runs_dir).map_err(|e| io_err(&runs_dir, e))?;
        let model_tag = self.cfg.endpoints.generation.model_tag.clone();

        struct PlannedRun {
            condition: Condition,
            mode: InferenceMode,
            threshold: f64,
            path: PathBuf,
            rel: String,
        }
        let mut planned: Vec<PlannedRun> = Vec::new();
        for &condition in &conditions {
            for &mode in &modes {
                for &threshold in &sec.thresholds {
                    let name = run_file_name(&model_tag, condition, mode, threshold);
                    planned.push(PlannedRun {
                        condition,
                        mode,
                        threshold,
                        path: runs_dir.join(&name),
                        rel: format!("{RUNS_DIR}/{name}"),
                    });
                }
            }
        }
        let partial_files: Vec<PathBuf> = planned.iter().map(|p| p.path.clone()).collect();
        self.stage_guard(Stage::Infer, fingerprint, &partial_files)?;

        let verifier = |answer: &str, truth: &str| crate::verify::answers_equivalent(answer, truth);

        let mut outputs: Vec<String> = Vec::new();
        for run in &planned {
            outputs.push(run.rel.clone());
            let eligible = filter_problems_by_threshold(&ordered_ids, &scores, run.threshold);
            let done: BTreeSet<String> = sanitize_jsonl::<InferenceRecord>(&run.path)?
                .into_iter()
                .map(|r| r.problem_id)
                .collect();
            let remaining: Vec<&Problem> = eligible
                .iter()
                .filter(|id| !done.contains(*id))
                .map(|id| {
                    problem_of.get(id.as_str()).copied().ok_or_else(|| {
                        PipelineError::Invalid(format!("scored problem {id} not in the benchmark"))
                    })
                })
                .collect::<Result<_, _>>()?;
            if remaining.is_empty() {
                // Still touch the file so a cross product with zero eligible
                // problems leaves a (possibly empty) record file behind.
                JsonlAppender::open(&run.path)?;
                continue;
            }
            // A fresh service per record file keeps scripted mock state
            // (attempt counters) independent across runs.
            let ctx = self.mock_context(Some(&problems));
            let svc = build_generation_service(&self.cfg.endpoints.generation, &ctx)?;
            let icfg = match run.mode {
                InferenceMode::Greedy => InferenceConfig {
                    mode: run.mode,
                    temperature: sec.temperature_greedy,
                    max_attempts: 1,
                    max_tokens: sec.max_tokens,
                    threshold: run.threshold,
                },
                InferenceMode::BestOfN => InferenceConfig {
                    mode: run.mode,
                    temperature: sec.temperature_bestofn,
                    max_attempts: sec.max_attempts,
                    max_tokens: sec.max_tokens,
                    threshold: run.threshold,
                },
            };
            let mut appender = JsonlAppender::open(&run.path)?;
            for problem in remaining {
                let selection = match run.condition {
                    Condition::Openmath => Some(
                        *selection_of
                            .get(problem.problem_id.as_str())
                            .ok_or_else(|| {
                                PipelineError::Invalid(format!(
                                    "no symbol selection for problem {}",
                                    problem.problem_id
                                ))
                            })?,
                    ),
                    Condition::Baseline => None,
                };
                let prompt = build_prompt(problem, selection, &kb, run.condition, &templates)?;
                let record = run_inference(problem, &prompt, &icfg, svc.as_ref(), &verifier)?;
                appender.append(&record)?;
            }
            log::info!("inference run {} complete", run.rel);
        }
        Ok(outputs)
    }

    fn stage_evaluate(&self) -> Result<Vec<String>, PipelineError> {
        let problems = self.load_problems()?;
        let mut records: Vec<InferenceRecord> = Vec::new();
        for path in self.list_run_files()? {
            records.extend(util::read_jsonl::<InferenceRecord>(&path)?);
        }
        let scores: Vec<ScoredPair> =
            util::read_json(&self.artifact_path(SCORES_FILE, Stage::Rerank)?)?;
        let metrics = build_metrics_report(&records, &problems)?;
        let coverage = coverage_report(&scores, &problems);
        let report = EvaluationReport {
            metrics,
            coverage: Some(coverage),
        };
        let reports_dir = self.out_dir.join(REPORTS_DIR);
        let written = emit_report(&report, &reports_dir)?;
        log::info!(
            "evaluation: {} report files in {}",
            written.len(),
            reports_dir.display()
        );
        Ok(written
            .iter()
            .map(|p| {
                p.strip_prefix(&self.out_dir)
                    .unwrap_or(p)
                    .to_string_lossy()
                    .into_owned()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_names_round_trip() {
        for stage in Stage::ORDER {
            assert_eq!(Stage::parse(stage.name()), Some(stage));
        }
        assert_eq!(Stage::parse("nope"), None);
    }

    #[test]
    fn offline_rejects_live_endpoints() {
        let mut cfg = PipelineConfig::default();
        cfg.paths.out_dir = tempfile::tempdir().unwrap().path().join("out");
        cfg.endpoints.generation.profile = "ollama".into();
        let err = Pipeline::new(cfg)
            .err()
            .expect("offline + live endpoint must fail");
        assert!(matches!(err, PipelineError::Config(_)));
    }

    #[test]
    fn sanitize_jsonl_truncates_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        std::fs::write(
            &path,
            "{\"problem_id\":\"a\",\"pairs\":[]}\n{\"problem_id\":\"b\",\"pai",
        )
        .unwrap();
        let records: Vec<ScoredBatch> = sanitize_jsonl(&path).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].problem_id, "a");
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "{\"problem_id\":\"a\",\"pairs\":[]}\n");
        // Appending after truncation yields a clean second record.
        let mut app = JsonlAppender::open(&path).unwrap();
        app.append(&ScoredBatch {
            problem_id: "b".into(),
            pairs: vec![],
        })
        .unwrap();
        drop(app);
        let records: Vec<ScoredBatch> = sanitize_jsonl(&path).unwrap();
        assert_eq!(records.len(), 2);
    }

    #[test]
    fn missing_artifact_names_the_producing_stage() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = PipelineConfig::default();
        cfg.paths.out_dir = dir.path().join("out");
        let p = Pipeline::new(cfg).unwrap();
        let err = p.artifact_path(KB_FILE, Stage::BuildKb).err().unwrap();
        match err {
            PipelineError::MissingArtifact { stage, .. } => assert_eq!(stage, "build-kb"),
            other => panic!("unexpected error: {other}"),
        }
    }
}
