//! Prompt construction and inference: render baseline / definition-augmented
//! prompts from shipped templates, run greedy or best-of-n generation with
//! online answer verification, and extract boxed answers from model output.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::Problem;
use crate::gateway::{GatewayError, GenerationRequest, GenerationService};
use crate::kb::KnowledgeBase;
use crate::rerank::SelectionResult;

/// Shipped prompt template for the baseline condition (problem only).
pub const DEFAULT_BASELINE_TEMPLATE: &str =
    include_str!("../../../assets/prompts/baseline_template.txt");

/// Shipped prompt template for the definition-augmented condition.
pub const DEFAULT_OPENMATH_TEMPLATE: &str =
    include_str!("../../../assets/prompts/openmath_template.txt");

/// Default per-attempt generation budget.
pub const DEFAULT_MAX_TOKENS: usize = 2048;

/// Prompting condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Baseline,
    Openmath,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Baseline => "baseline",
            Condition::Openmath => "openmath",
        }
    }
}

/// Sampling regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InferenceMode {
    Greedy,
    BestOfN,
}

impl InferenceMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InferenceMode::Greedy => "greedy",
            InferenceMode::BestOfN => "best_of_n",
        }
    }

    /// Compact form used in run file names and CLI arguments.
    pub fn file_str(&self) -> &'static str {
        match self {
            InferenceMode::Greedy => "greedy",
            InferenceMode::BestOfN => "bestofn",
        }
    }

    pub fn parse(s: &str) -> Option<InferenceMode> {
        match s {
            "greedy" => Some(InferenceMode::Greedy),
            "bestofn" | "best_of_n" | "best-of-n" => Some(InferenceMode::BestOfN),
            _ => None,
        }
    }
}

/// A rendered prompt plus the template it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub condition: Condition,
    pub template_id: String,
    pub rendered: String,
}

/// The two prompt templates, loaded from config assets (or the shipped
/// defaults). Placeholders: `{problem}` and, for the augmented condition,
/// `{symbol_context}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplates {
    pub baseline: String,
    pub openmath: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            baseline: DEFAULT_BASELINE_TEMPLATE.to_string(),
            openmath: DEFAULT_OPENMATH_TEMPLATE.to_string(),
        }
    }
}

impl PromptTemplates {
    /// Read `baseline_template.txt` and `openmath_template.txt` from a
    /// directory.
    pub fn load_from_dir(dir: &Path) -> std::io::Result<PromptTemplates> {
        Ok(PromptTemplates {
            baseline: std::fs::read_to_string(dir.join("baseline_template.txt"))?,
            openmath: std::fs::read_to_string(dir.join("openmath_template.txt"))?,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("condition {condition:?} requires a non-empty symbol selection for {problem_id}")]
    MissingSelection {
        problem_id: String,
        condition: Condition,
    },
    #[error("selected symbol {symbol_id} not present in the knowledge base")]
    UnknownSymbol { symbol_id: String },
    #[error("generation failed on every attempt for {problem_id}; stage can be resumed: {last}")]
    AllAttemptsFailed {
        problem_id: String,
        #[source]
        last: GatewayError,
    },
    #[error("generation service misconfigured: {0}")]
    Fatal(#[source] GatewayError),
}

/// Render the per-symbol context blocks, in selection order: lines
/// `Symbol:`, `Description:`, `Properties:` (normalized properties joined by
/// "; "), blocks separated by a blank line. Empty fields omit their line.
pub fn format_symbol_context(symbols: &[&crate::kb::SymbolEntry]) -> String {
    let blocks: Vec<String> = symbols
        .iter()
        .map(|s| {
            let mut lines = vec![format!("Symbol: {}", s.symbol_id)];
            if !s.description.is_empty() {
                lines.push(format!("Description: {}", s.description));
            }
            if !s.cmps.is_empty() {
                lines.push(format!("Properties: {}", s.cmps.join("; ")));
            }
            lines.join("\n")
        })
        .collect();
    blocks.join("\n\n")
}

/// Render the prompt for a problem under the given condition. The augmented
/// condition requires a selection with at least one resolvable symbol.
pub fn build_prompt(
    problem: &Problem,
    selection: Option<&SelectionResult>,
    kb: &KnowledgeBase,
    condition: Condition,
    templates: &PromptTemplates,
) -> Result<PromptSpec, InferenceError> {
    let rendered = match condition {
        Condition::Baseline => templates
            .baseline
            .trim_end()
            .replace("{problem}", &problem.statement),
        Condition::Openmath => {
            let selection = selection
                .filter(|s| !s.selected_symbol_ids.is_empty())
                .ok_or(InferenceError::MissingSelection {
                    problem_id: problem.problem_id.clone(),
                    condition,
                })?;
            let symbols: Vec<&crate::kb::SymbolEntry> = selection
                .selected_symbol_ids
                .iter()
                .map(|id| {
                    kb.get(id).ok_or_else(|| InferenceError::UnknownSymbol {
                        symbol_id: id.clone(),
                    })
                })
                .collect::<Result<_, _>>()?;
            templates
                .openmath
                .trim_end()
                .replace("{symbol_context}", &format_symbol_context(&symbols))
                .replace("{problem}", &problem.statement)
        }
    };
    Ok(PromptSpec {
        condition,
        template_id: match condition {
            Condition::Baseline => "baseline_template".to_string(),
            Condition::Openmath => "openmath_template".to_string(),
        },
        rendered,
    })
}

/// Take the content of the last balanced `\boxed{...}` (or other command)
/// group in `text`.
fn last_balanced_group(text: &str, command: &str) -> Option<String> {
    let opener = format!("{command}{{");
    let mut found = None;
    let mut search_from = 0;
    while let Some(pos) = text[search_from..].find(&opener) {
        let start = search_from + pos + opener.len();
        let mut depth = 1usize;
        let mut end = None;
        for (i, c) in text[start..].char_indices() {
            match c {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(start + i);
                        break;
                    }
                }
                _ => {}
            }
        }
        if let Some(end) = end {
            found = Some(text[start..end].to_string());
        }
        search_from = search_from + pos + opener.len();
    }
    found
}

/// Trailing "answer is X" clause: the text after the last occurrence up to
/// the end of its line, trimmed of surrounding punctuation.
fn answer_is_clause(text: &str) -> Option<String> {
    let lower = text.to_lowercase();
    let pos = lower.rfind("answer is")?;
    let rest = &text[pos + "answer is".len()..];
    let line = rest.lines().next().unwrap_or("");
    let cleaned = line.trim().trim_end_matches(['.', '!']).trim();
    if cleaned.is_empty() {
        None
    } else {
        Some(cleaned.to_string())
    }
}

/// Extract the model's final answer: last balanced `\boxed{}` group, then
/// `\fbox{}`, then a trailing "answer is X" clause.
pub fn extract_answer(output: &str) -> Option<String> {
    last_balanced_group(output, "\\boxed")
        .or_else(|| last_balanced_group(output, "\\fbox"))
        .or_else(|| answer_is_clause(output))
}

/// Per-run inference parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub mode: InferenceMode,
    pub temperature: f64,
    pub max_attempts: u32,
    pub max_tokens: usize,
    pub threshold: f64,
}

impl InferenceConfig {
    /// Single attempt at temperature zero.
    pub fn greedy(threshold: f64) -> InferenceConfig {
        InferenceConfig {
            mode: InferenceMode::Greedy,
            temperature: 0.0,
            max_attempts: 1,
            max_tokens: DEFAULT_MAX_TOKENS,
            threshold,
        }
    }

    /// Up to five attempts at temperature 0.6, stopping at the first correct.
    pub fn best_of_n(threshold: f64) -> InferenceConfig {
        InferenceConfig {
            mode: InferenceMode::BestOfN,
            temperature: 0.6,
            max_attempts: 5,
            max_tokens: DEFAULT_MAX_TOKENS,
            threshold,
        }
    }
}

/// Outcome of running one problem under one (condition, mode, threshold).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceRecord {
    pub problem_id: String,
    pub model_tag: String,
    pub condition: Condition,
    pub mode: InferenceMode,
    pub threshold: f64,
    /// 1-based index of the first correct attempt, or the attempt budget
    /// when none was correct.
    pub attempts_used: u32,
    pub attempt_outputs: Vec<String>,
    pub extracted_answer: Option<String>,
    pub correct: bool,
    pub timing_ms: u64,
}

/// Run greedy or best-of-n inference for one problem. Attempts are
/// sequential; each attempt's extracted answer is verified against ground
/// truth and the loop stops at the first correct one. A failed generation is
/// recorded as a failed attempt and the loop continues; if every attempt
/// fails to produce text the stage gets a resumable error. Non-retryable
/// service errors abort immediately.
pub fn run_inference(
    problem: &Problem,
    prompt: &PromptSpec,
    cfg: &InferenceConfig,
    generator: &dyn GenerationService,
    verifier: &dyn Fn(&str, &str) -> bool,
) -> Result<InferenceRecord, InferenceError> {
    let started = Instant::now();
    let mut attempt_outputs = Vec::new();
    let mut extracted_answer: Option<String> = None;
    let mut correct = false;
    let mut attempts_used = cfg.max_attempts.max(1);
    let mut any_text = false;
    let mut last_err: Option<GatewayError> = None;
    for attempt in 1..=cfg.max_attempts.max(1) {
        let response = generator.generate(&GenerationRequest {
            prompt: prompt.rendered.clone(),
            temperature: cfg.temperature,
            max_tokens: cfg.max_tokens,
            structured_json: false,
        });
        match response {
            Ok(r) => {
                any_text = true;
                let extraction = extract_answer(&r.text);
                attempt_outputs.push(r.text);
                if let Some(ans) = extraction {
                    let ok = verifier(&ans, &problem.ground_truth);
                    extracted_answer = Some(ans);
                    if ok {
                        correct = true;
                        attempts_used = attempt;
                        break;
                    }
                } else {
                    extracted_answer = None;
                }
            }
            Err(e) if e.is_retryable() => {
                log::warn!(
                    "attempt {attempt} failed for {}: {e}; continuing",
                    problem.problem_id
                );
                attempt_outputs.push(format!("<attempt failed: {e}>"));
                last_err = Some(e);
            }
            Err(e) => return Err(InferenceError::Fatal(e)),
        }
    }
    if !any_text {
        return Err(InferenceError::AllAttemptsFailed {
            problem_id: problem.problem_id.clone(),
            last: last_err.unwrap_or(GatewayError::Fatal {
                endpoint: generator.model_tag(),
                detail: "no attempts were issued".to_string(),
            }),
        });
    }
    Ok(InferenceRecord {
        problem_id: problem.problem_id.clone(),
        model_tag: generator.model_tag(),
        condition: prompt.condition,
        mode: cfg.mode,
        threshold: cfg.threshold,
        attempts_used,
        attempt_outputs,
        extracted_answer,
        correct,
        timing_ms: started.elapsed().as_millis() as u64,
    })
}

/// Threshold rendered for file names: always at least one decimal
/// ("0.0", "0.3", "0.05").
pub fn format_threshold(t: f64) -> String {
    let mut s = format!("{t}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    s
}

/// Canonical run-file name: `<model>_<condition>_<mode>_T<threshold>.jsonl`.
pub fn run_file_name(
    model_tag: &str,
    condition: Condition,
    mode: InferenceMode,
    threshold: f64,
) -> String {
    format!(
        "{}_{}_{}_T{}.jsonl",
        crate::util::sanitize_component(model_tag),
        condition.as_str(),
        mode.file_str(),
        format_threshold(threshold)
    )
}
