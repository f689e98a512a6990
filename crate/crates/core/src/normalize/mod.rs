//! LaTeX normalization of knowledge-base text fields.
//!
//! Every symbol field (description, each property, each example) is
//! converted to consistent LaTeX through three paths, in precedence order:
//! manual corrections, the deterministic pattern grammar, and a few-shot
//! model fallback. Fields no path can convert are left `unchanged` and
//! count against the coverage metric.

mod corrections;
mod latex;
mod pattern;

pub use corrections::{apply_manual_corrections, CorrectionRecord, Corrections, FieldPath};
pub use latex::latex_valid;
pub use pattern::{escape_text, pattern_normalize, RuleFamily};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::gateway::{GatewayError, GenerationRequest, GenerationService};
use crate::kb::KnowledgeBase;
use crate::util;

/// Errors raised by the normalization stage.
#[derive(Debug, thiserror::Error)]
pub enum NormalizeError {
    #[error("correction for {symbol_id} invalid: {detail}")]
    BadCorrection { symbol_id: String, detail: String },
    #[error("correction targets missing field {symbol_id}/{field_path}")]
    UnresolvedCorrection {
        symbol_id: String,
        field_path: String,
    },
    #[error(transparent)]
    Util(#[from] util::UtilError),
    #[error("generation service failed while normalizing {field}: {source}")]
    Service {
        field: String,
        #[source]
        source: GatewayError,
    },
}

/// Which path produced a field's normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormPath {
    Pattern,
    Model,
    Manual,
    Unchanged,
}

impl NormPath {
    fn as_str(self) -> &'static str {
        match self {
            NormPath::Pattern => "pattern",
            NormPath::Model => "model",
            NormPath::Manual => "manual",
            NormPath::Unchanged => "unchanged",
        }
    }
}

/// Per-field outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizationResult {
    pub symbol_id: String,
    pub field_path: String,
    pub original: String,
    pub normalized: String,
    pub path: NormPath,
    pub valid: bool,
    /// Pattern rule family when path=pattern.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    /// Model attempts consumed (0 unless the model path ran).
    #[serde(default)]
    pub attempts: u32,
}

/// Stage report (`normalization_report.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub fields_total: usize,
    pub fields_valid: usize,
    /// fields_valid / fields_total.
    pub coverage: f64,
    pub by_path: BTreeMap<String, usize>,
    pub results: Vec<NormalizationResult>,
}

/// Options for the normalization stage.
pub struct NormalizeOptions {
    /// Pattern + corrections only; never call the model.
    pub offline: bool,
    /// Model attempts per field before giving up.
    pub retry_limit: u32,
    /// Few-shot conversion prompt with an `{input}` placeholder.
    pub fewshot_template: String,
    pub max_inflight: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        Self {
            offline: true,
            retry_limit: 2,
            fewshot_template: String::new(),
            max_inflight: 4,
        }
    }
}

/// Extract `{"latex": "..."}` from a model response, tolerating surrounding
/// prose.
fn parse_latex_response(text: &str) -> Option<String> {
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(text.trim()) {
        if let Some(s) = v.get("latex").and_then(|l| l.as_str()) {
            return Some(s.to_string());
        }
    }
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    let v: serde_json::Value = serde_json::from_str(&text[start..=end]).ok()?;
    v.get("latex").and_then(|l| l.as_str()).map(str::to_string)
}

/// Normalize one field with pattern → model fallback (no corrections).
pub fn normalize_with_fallback(
    expr: &str,
    generator: &dyn GenerationService,
    opts: &NormalizeOptions,
) -> Result<NormalizationResult, GatewayError> {
    let mut result = NormalizationResult {
        symbol_id: String::new(),
        field_path: String::new(),
        original: expr.to_string(),
        normalized: expr.to_string(),
        path: NormPath::Unchanged,
        valid: false,
        rule: None,
        attempts: 0,
    };
    if let Some((latex, family)) = pattern_normalize(expr) {
        result.normalized = latex;
        result.path = NormPath::Pattern;
        result.valid = true;
        result.rule = Some(family.as_str().to_string());
        return Ok(result);
    }
    if opts.offline {
        return Ok(result);
    }
    let prompt = opts.fewshot_template.replace("{input}", expr);
    for attempt in 1..=opts.retry_limit.max(1) {
        result.attempts = attempt;
        let resp = generator.generate(&GenerationRequest {
            prompt: prompt.clone(),
            temperature: 0.0,
            max_tokens: 512,
            structured_json: true,
        })?;
        if let Some(latex) = parse_latex_response(&resp.text) {
            if latex_valid(&latex) {
                result.normalized = latex;
                result.path = NormPath::Model;
                result.valid = true;
                return Ok(result);
            }
        }
        log::warn!("model produced invalid LaTeX (attempt {attempt}) for input: {expr}");
    }
    Ok(result)
}

fn field_inputs(entry: &crate::kb::SymbolEntry) -> Vec<(FieldPath, String)> {
    let mut fields = vec![(FieldPath::Description, entry.description.clone())];
    fields.extend(
        entry
            .cmps
            .iter()
            .enumerate()
            .map(|(i, c)| (FieldPath::Cmp(i), c.clone())),
    );
    fields.extend(
        entry
            .examples
            .iter()
            .enumerate()
            .map(|(i, e)| (FieldPath::Example(i), e.clone())),
    );
    fields
}

/// Normalize every field of every symbol. Returns the normalized KB (fields
/// replaced wherever a path produced valid LaTeX) and the report.
pub fn normalize_kb(
    kb: &KnowledgeBase,
    corrections: &Corrections,
    generator: Option<&dyn GenerationService>,
    opts: &NormalizeOptions,
) -> Result<(KnowledgeBase, NormalizationReport), NormalizeError> {
    // (symbol index, field, input) triples in deterministic order
    let mut jobs: Vec<(usize, FieldPath, String)> = Vec::new();
    for (si, entry) in kb.symbols.iter().enumerate() {
        for (fp, input) in field_inputs(entry) {
            jobs.push((si, fp, input));
        }
    }

    let process = |(si, fp, input): (usize, FieldPath, String)| -> Result<(usize, FieldPath, NormalizationResult), NormalizeError> {
        let symbol_id = kb.symbols[si].symbol_id.clone();
        let field_path = fp.render();
        if let Some(replacement) = corrections.get(&symbol_id, &field_path) {
            return Ok((
                si,
                fp,
                NormalizationResult {
                    symbol_id,
                    field_path,
                    original: input,
                    normalized: replacement.to_string(),
                    path: NormPath::Manual,
                    valid: true, // validated at corrections load time
                    rule: None,
                    attempts: 0,
                },
            ));
        }
        let mut r = match generator {
            Some(g) if !opts.offline => normalize_with_fallback(&input, g, opts)
                .map_err(|e| NormalizeError::Service {
                    field: format!("{symbol_id}/{field_path}"),
                    source: e,
                })?,
            _ => {
                let offline = NormalizeOptions { offline: true, ..NormalizeOptions::default() };
                normalize_with_fallback(&input, &NoGenerator, &offline).expect("offline path")
            }
        };
        r.symbol_id = symbol_id;
        r.field_path = field_path;
        Ok((si, fp, r))
    };

    let inflight = if opts.offline {
        1
    } else {
        opts.max_inflight.max(1)
    };
    let processed = util::bounded_parallel_map(jobs, inflight, process);

    let mut out = kb.clone();
    let mut results = Vec::with_capacity(processed.len());
    let mut by_path: BTreeMap<String, usize> = BTreeMap::new();
    let mut valid = 0usize;
    for item in processed {
        let (si, fp, r) = item?;
        if r.valid {
            valid += 1;
            let entry = &mut out.symbols[si];
            match fp {
                FieldPath::Description => entry.description = r.normalized.clone(),
                FieldPath::Cmp(i) => entry.cmps[i] = r.normalized.clone(),
                FieldPath::Example(i) => entry.examples[i] = r.normalized.clone(),
            }
        }
        *by_path.entry(r.path.as_str().to_string()).or_insert(0) += 1;
        results.push(r);
    }
    let fields_total = results.len();
    let report = NormalizationReport {
        fields_total,
        fields_valid: valid,
        coverage: if fields_total == 0 {
            0.0
        } else {
            valid as f64 / fields_total as f64
        },
        by_path,
        results,
    };
    Ok((out, report))
}

/// Stand-in generator for offline mode (never called).
struct NoGenerator;

impl GenerationService for NoGenerator {
    fn generate(
        &self,
        _req: &GenerationRequest,
    ) -> Result<crate::gateway::GenerationResponse, GatewayError> {
        Err(GatewayError::Fatal {
            endpoint: "offline".into(),
            detail: "no generator in offline mode".into(),
        })
    }

    fn model_tag(&self) -> String {
        "none".into()
    }
}
