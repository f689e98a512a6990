//! Concept extraction: turn a problem statement into a short list of
//! mathematical concept keywords via a structured-output generation call.

use serde::{Deserialize, Serialize};

use crate::bench::Problem;
use crate::gateway::{GatewayError, GenerationRequest, GenerationService};

/// Instruction block sent before the problem statement.
pub const EXTRACTOR_PROMPT: &str = include_str!("../../../assets/prompts/concept_extractor.txt");

/// Output token cap: small enough that the model cannot solve the problem.
pub const EXTRACTOR_MAX_TOKENS: usize = 100;

/// Total generation calls before giving up (1 initial + 2 retries).
pub const EXTRACTOR_ATTEMPTS: u32 = 3;

/// Target concept-count range.
pub const TARGET_RANGE: std::ops::RangeInclusive<usize> = 4..=8;

/// Concepts extracted for one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptSet {
    pub problem_id: String,
    pub concepts: Vec<String>,
    pub in_target_range: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ConceptError {
    #[error("generation service: {0}")]
    Service(#[from] GatewayError),
    #[error(
        "problem {problem_id}: no usable concept list after {attempts} attempts \
         (flag for manual correction); last output: {raw:?}"
    )]
    Unparseable {
        problem_id: String,
        attempts: u32,
        raw: String,
    },
}

#[derive(Deserialize)]
struct ConceptsPayload {
    concepts: Vec<String>,
}

/// Parse a `{"concepts": [...]}` object from model output, tolerating
/// leading/trailing prose around the JSON object.
fn parse_concepts_response(text: &str) -> Option<Vec<String>> {
    if let Ok(p) = serde_json::from_str::<ConceptsPayload>(text.trim()) {
        return Some(p.concepts);
    }
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    if end <= start {
        return None;
    }
    serde_json::from_str::<ConceptsPayload>(&text[start..=end])
        .ok()
        .map(|p| p.concepts)
}

/// Lowercase, trim, drop empties, and deduplicate preserving order. Concepts
/// that are bare numbers equal to the ground-truth answer are rejected
/// (extraction must not solve the problem).
fn canonicalize(raw: Vec<String>, ground_truth: &str) -> Vec<String> {
    let answer = ground_truth.trim();
    let mut out: Vec<String> = Vec::new();
    for c in raw {
        let c = c.trim().to_lowercase();
        if c.is_empty() || out.contains(&c) {
            continue;
        }
        let is_bare_number = c
            .chars()
            .all(|ch| ch.is_ascii_digit() || ch == '.' || ch == '-')
            && c.chars().any(|ch| ch.is_ascii_digit());
        if is_bare_number && c == answer.to_lowercase() {
            log::warn!("dropping concept {c:?}: equals the ground-truth answer");
            continue;
        }
        out.push(c);
    }
    out
}

/// Extract the concept list for one problem. Temperature 0, 100-token cap,
/// structured JSON mode. Unusable output (unparseable or empty after
/// canonicalization) is retried up to [`EXTRACTOR_ATTEMPTS`] total calls,
/// then reported as an error carrying the raw output.
pub fn extract_concepts(
    problem: &Problem,
    generator: &dyn GenerationService,
) -> Result<ConceptSet, ConceptError> {
    let prompt = format!(
        "{}\n\nProblem: {}",
        EXTRACTOR_PROMPT.trim_end(),
        problem.statement
    );
    let mut last_raw = String::new();
    for _ in 0..EXTRACTOR_ATTEMPTS {
        let response = generator.generate(&GenerationRequest {
            prompt: prompt.clone(),
            temperature: 0.0,
            max_tokens: EXTRACTOR_MAX_TOKENS,
            structured_json: true,
        })?;
        last_raw = response.text;
        if let Some(raw) = parse_concepts_response(&last_raw) {
            let concepts = canonicalize(raw, &problem.ground_truth);
            if !concepts.is_empty() {
                let in_target_range = TARGET_RANGE.contains(&concepts.len());
                return Ok(ConceptSet {
                    problem_id: problem.problem_id.clone(),
                    concepts,
                    in_target_range,
                });
            }
        }
    }
    Err(ConceptError::Unparseable {
        problem_id: problem.problem_id.clone(),
        attempts: EXTRACTOR_ATTEMPTS,
        raw: last_raw,
    })
}

/// Aggregate statistics over extracted concept sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptStats {
    pub problems: usize,
    pub total_concepts: usize,
    /// Mean concepts per problem; absent when there are no sets.
    pub mean_concepts: Option<f64>,
    pub in_target_range: usize,
}

pub fn concept_stats(sets: &[ConceptSet]) -> ConceptStats {
    let total: usize = sets.iter().map(|s| s.concepts.len()).sum();
    ConceptStats {
        problems: sets.len(),
        total_concepts: total,
        mean_concepts: if sets.is_empty() {
            None
        } else {
            Some(total as f64 / sets.len() as f64)
        },
        in_target_range: sets.iter().filter(|s| s.in_target_range).count(),
    }
}
