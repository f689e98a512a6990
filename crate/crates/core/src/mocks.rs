//! Deterministic scripted model services for tests and offline runs.
//!
//! The mocks implement the same [`gateway`](crate::gateway) traits as the
//! HTTP clients, so offline mode exercises the production code paths. All
//! behaviors are pure functions of `(request, seed)` apart from the
//! per-problem attempt counters used by `correct_on_attempt_k`, which are
//! single-owner state inside the service instance (fresh per stage run).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gateway::{
    EmbeddingService, GatewayError, GenerationRequest, GenerationResponse, GenerationService,
    ScoringService,
};

/// Scripted request→response entry. The first entry whose `contains`
/// substring appears in the prompt wins.
#[derive(Debug, Clone)]
pub struct ScriptEntry {
    pub contains: String,
    pub response: String,
}

/// Shared context for constructing mocks.
#[derive(Debug, Clone)]
pub struct MockContext {
    pub seed: u64,
    /// Dimension for mock embedding vectors.
    pub embed_dim: usize,
    /// problem statement → ground-truth answer, for correctness-aware
    /// generation policies.
    pub ground_truth: BTreeMap<String, String>,
    /// Scripted overrides, consulted before any policy.
    pub scripts: Vec<ScriptEntry>,
    /// Reported model tag.
    pub model_tag: String,
}

impl Default for MockContext {
    fn default() -> Self {
        Self {
            seed: 17,
            embed_dim: 64,
            ground_truth: BTreeMap::new(),
            scripts: Vec::new(),
            model_tag: "mock-model".into(),
        }
    }
}

/// Answer policy for the generation mock.
#[derive(Debug, Clone, PartialEq)]
pub enum AnswerPolicy {
    AlwaysCorrect,
    AlwaysWrong,
    /// Wrong on attempts 1..k-1, correct from attempt k on (per problem).
    CorrectOnAttempt(u32),
    /// Correct iff the prompt contains the trigger substring
    /// (case-insensitive); used to make augmented prompts succeed where
    /// plain ones fail.
    KeywordConditioned(String),
}

impl AnswerPolicy {
    /// Parse the suffix of a `mock:` profile string.
    pub fn parse(s: &str) -> Option<Self> {
        if s == "always_correct" {
            Some(Self::AlwaysCorrect)
        } else if s == "always_wrong" {
            Some(Self::AlwaysWrong)
        } else if let Some(k) = s.strip_prefix("correct_on_attempt_") {
            k.parse().ok().map(Self::CorrectOnAttempt)
        } else if s == "keyword_conditioned" {
            Some(Self::KeywordConditioned(
                "the following mathematical definitions".into(),
            ))
        } else {
            s.strip_prefix("keyword_conditioned:")
                .map(|kw| Self::KeywordConditioned(kw.to_string()))
        }
    }
}

/// Pull the problem statement back out of a rendered prompt. Relies on the
/// prompt templates' `Problem: ` marker; statements containing a blank line
/// followed by a template instruction would confuse this, which is fine for
/// the fixtures the mocks are used with.
pub fn statement_from_prompt(prompt: &str) -> Option<String> {
    let idx = prompt.rfind("Problem: ")?;
    let rest = &prompt[idx + "Problem: ".len()..];
    let end = ["\n\nSolve this problem", "\n\nUse the provided definitions"]
        .iter()
        .filter_map(|m| rest.find(m))
        .min()
        .unwrap_or(rest.len());
    let stmt = rest[..end].trim();
    (!stmt.is_empty()).then(|| stmt.to_string())
}

fn simple_tokens(text: &str) -> BTreeSet<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Concept lexicon for the scripted extractor: category exemplars plus
/// benchmark-common terms.
const CONCEPT_LEXICON: &[&str] = &[
    "addition",
    "integration",
    "differentiation",
    "subtraction",
    "multiplication",
    "division",
    "gcd",
    "sin",
    "cos",
    "tan",
    "log",
    "factorial",
    "determinant",
    "lcm",
    "modulus",
    "integer",
    "polynomial",
    "matrix",
    "set",
    "sequence",
    "fraction",
    "prime",
    "probability",
    "triangle",
    "circle",
    "angle",
    "percentage",
    "average",
    "remainder",
    "divisor",
    "multiple",
    "series",
    "root",
    "equation",
    "quadratic",
    "vertex",
    "parabola",
    "units digit",
    "permutation",
    "combination",
    "subset",
    "perimeter",
    "area",
    "volume",
    "hypotenuse",
    "complex number",
    "absolute value",
    "arithmetic sequence",
    "geometric series",
    "greatest common divisor",
    "least common multiple",
    "interior angle",
    "period",
    "committee",
    "dice",
    "coin",
];

const GENERIC_CONCEPTS: &[&str] = &["algebra", "arithmetic", "number", "computation"];

/// Deterministic concept extraction used when a generation mock receives the
/// extractor prompt: lexicon phrases found in the statement, padded to at
/// least four with generic terms and capped at eight.
pub fn scripted_concepts(statement: &str) -> Vec<String> {
    let lower = statement.to_lowercase();
    let mut out: Vec<String> = Vec::new();
    for phrase in CONCEPT_LEXICON {
        if lower.contains(phrase) && !out.iter().any(|c| c == phrase) {
            out.push((*phrase).to_string());
        }
        if out.len() == 8 {
            return out;
        }
    }
    for g in GENERIC_CONCEPTS {
        if out.len() >= 4 {
            break;
        }
        if !out.iter().any(|c| c == g) {
            out.push((*g).to_string());
        }
    }
    out
}

/// Scripted generation service.
pub struct MockGenerationService {
    policy: AnswerPolicy,
    ctx: MockContext,
    attempt_counts: Mutex<BTreeMap<String, u32>>,
}

impl MockGenerationService {
    pub fn new(policy: AnswerPolicy, ctx: MockContext) -> Self {
        Self {
            policy,
            ctx,
            attempt_counts: Mutex::new(BTreeMap::new()),
        }
    }

    fn wrong_answer(gt: &str) -> String {
        if gt.trim() == "0" {
            "1".into()
        } else {
            "0".into()
        }
    }

    fn solve(&self, prompt: &str) -> String {
        let statement = statement_from_prompt(prompt).unwrap_or_default();
        let gt = self
            .ctx
            .ground_truth
            .get(&statement)
            .cloned()
            .unwrap_or_else(|| "0".into());
        let attempt = {
            let mut counts = self.attempt_counts.lock().expect("mock counter lock");
            let c = counts.entry(statement.clone()).or_insert(0);
            *c += 1;
            *c
        };
        let correct = match &self.policy {
            AnswerPolicy::AlwaysCorrect => true,
            AnswerPolicy::AlwaysWrong => false,
            AnswerPolicy::CorrectOnAttempt(k) => attempt >= *k,
            AnswerPolicy::KeywordConditioned(kw) => {
                prompt.to_lowercase().contains(&kw.to_lowercase())
            }
        };
        let answer = if correct { gt } else { Self::wrong_answer(&gt) };
        format!(
            "Working through the problem step by step.\nThe final answer is \\boxed{{{answer}}}."
        )
    }
}

impl GenerationService for MockGenerationService {
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResponse, GatewayError> {
        for entry in &self.ctx.scripts {
            if req.prompt.contains(&entry.contains) {
                return Ok(GenerationResponse {
                    text: entry.response.clone(),
                    model_tag: self.ctx.model_tag.clone(),
                });
            }
        }
        let text = if req.prompt.contains("mathematical entity extractor") {
            let statement = statement_from_prompt(&req.prompt).unwrap_or_default();
            serde_json::json!({ "concepts": scripted_concepts(&statement) }).to_string()
        } else if req
            .prompt
            .contains("Convert each mathematical expression to valid LaTeX")
        {
            // normalization fallback: pattern-convert the trailing input, or
            // wrap it as escaped text so the output is always valid LaTeX
            let input = req
                .prompt
                .lines()
                .rev()
                .find_map(|l| l.strip_prefix("Input: "))
                .unwrap_or_default();
            let latex = crate::normalize::pattern_normalize(input)
                .map(|(latex, _)| latex)
                .unwrap_or_else(|| format!("\\text{{{}}}", crate::normalize::escape_text(input)));
            serde_json::json!({ "latex": latex }).to_string()
        } else {
            self.solve(&req.prompt)
        };
        Ok(GenerationResponse {
            text,
            model_tag: self.ctx.model_tag.clone(),
        })
    }

    fn model_tag(&self) -> String {
        self.ctx.model_tag.clone()
    }
}

/// Embedding policy for the embedding mock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingPolicy {
    /// Token multiset → seeded pseudo-random unit vector (stable across
    /// runs and platforms).
    HashProjection,
    /// Whole text hashes to a single standard-basis vector.
    Basis,
}

pub struct MockEmbeddingService {
    policy: EmbeddingPolicy,
    ctx: MockContext,
    token_cache: Mutex<BTreeMap<String, Vec<f32>>>,
}

impl MockEmbeddingService {
    pub fn new(policy: EmbeddingPolicy, ctx: MockContext) -> Self {
        Self {
            policy,
            ctx,
            token_cache: Mutex::new(BTreeMap::new()),
        }
    }

    fn token_vector(&self, token: &str) -> Vec<f32> {
        if let Some(v) = self.token_cache.lock().expect("cache lock").get(token) {
            return v.clone();
        }
        let mut h = 0xcbf29ce484222325u64; // FNV-1a
        for b in token.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.ctx.seed ^ h);
        let v: Vec<f32> = (0..self.ctx.embed_dim)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        self.token_cache
            .lock()
            .expect("cache lock")
            .insert(token.to_string(), v.clone());
        v
    }

    fn embed_one(&self, text: &str) -> Vec<f32> {
        match self.policy {
            EmbeddingPolicy::Basis => {
                let mut h = 0xcbf29ce484222325u64;
                for b in text.bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x100000001b3);
                }
                let mut v = vec![0.0; self.ctx.embed_dim];
                v[(h % self.ctx.embed_dim as u64) as usize] = 1.0;
                v
            }
            EmbeddingPolicy::HashProjection => {
                let mut acc = vec![0.0f32; self.ctx.embed_dim];
                let tokens = simple_tokens(text);
                if tokens.is_empty() {
                    acc[0] = 1.0;
                    return acc;
                }
                for t in &tokens {
                    for (a, b) in acc.iter_mut().zip(self.token_vector(t)) {
                        *a += b;
                    }
                }
                let norm = acc.iter().map(|x| x * x).sum::<f32>().sqrt();
                if norm > 0.0 {
                    for a in &mut acc {
                        *a /= norm;
                    }
                }
                acc
            }
        }
    }
}

impl EmbeddingService for MockEmbeddingService {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, GatewayError> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }

    fn model_tag(&self) -> String {
        format!("{}-embed", self.ctx.model_tag)
    }
}

/// Scoring policy for the scoring mock.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoringPolicy {
    /// Jaccard overlap of token sets.
    KeywordOverlap,
    Constant(f64),
}

pub struct MockScoringService {
    policy: ScoringPolicy,
    ctx: MockContext,
}

impl MockScoringService {
    pub fn new(policy: ScoringPolicy, ctx: MockContext) -> Self {
        Self { policy, ctx }
    }
}

impl ScoringService for MockScoringService {
    fn score(&self, query: &str, documents: &[String]) -> Result<Vec<f64>, GatewayError> {
        let q = simple_tokens(query);
        Ok(documents
            .iter()
            .map(|d| match &self.policy {
                ScoringPolicy::Constant(c) => *c,
                ScoringPolicy::KeywordOverlap => {
                    let dt = simple_tokens(d);
                    let inter = q.intersection(&dt).count() as f64;
                    let union = q.union(&dt).count() as f64;
                    if union == 0.0 {
                        0.0
                    } else {
                        (inter / union).clamp(0.0, 1.0)
                    }
                }
            })
            .collect())
    }

    fn model_tag(&self) -> String {
        format!("{}-score", self.ctx.model_tag)
    }
}
