//! Benchmark ingestion: load MATH-style problem files (JSONL) with a
//! configurable field mapping and validate the expected 500-problem
//! distribution across subject types and difficulty levels.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// The seven MATH subject types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SubjectType {
    Algebra,
    CountingAndProbability,
    Geometry,
    IntermediateAlgebra,
    NumberTheory,
    Prealgebra,
    Precalculus,
}

impl SubjectType {
    pub const ALL: [SubjectType; 7] = [
        SubjectType::Algebra,
        SubjectType::CountingAndProbability,
        SubjectType::Geometry,
        SubjectType::IntermediateAlgebra,
        SubjectType::NumberTheory,
        SubjectType::Prealgebra,
        SubjectType::Precalculus,
    ];

    pub fn display_name(&self) -> &'static str {
        match self {
            SubjectType::Algebra => "Algebra",
            SubjectType::CountingAndProbability => "Counting & Probability",
            SubjectType::Geometry => "Geometry",
            SubjectType::IntermediateAlgebra => "Intermediate Algebra",
            SubjectType::NumberTheory => "Number Theory",
            SubjectType::Prealgebra => "Prealgebra",
            SubjectType::Precalculus => "Precalculus",
        }
    }

    /// Stable index into [`Self::ALL`].
    pub fn index(&self) -> usize {
        Self::ALL
            .iter()
            .position(|t| t == self)
            .expect("listed in ALL")
    }

    /// Slug used in problem ids and file paths.
    pub fn slug(&self) -> &'static str {
        match self {
            SubjectType::Algebra => "algebra",
            SubjectType::CountingAndProbability => "counting_and_probability",
            SubjectType::Geometry => "geometry",
            SubjectType::IntermediateAlgebra => "intermediate_algebra",
            SubjectType::NumberTheory => "number_theory",
            SubjectType::Prealgebra => "prealgebra",
            SubjectType::Precalculus => "precalculus",
        }
    }

    pub fn parse(s: &str) -> Option<SubjectType> {
        let folded: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .flat_map(|c| c.to_lowercase())
            .collect();
        Self::ALL.iter().copied().find(|t| {
            let canon: String = t
                .display_name()
                .chars()
                .filter(|c| c.is_ascii_alphanumeric())
                .flat_map(|c| c.to_lowercase())
                .collect();
            canon == folded || t.slug().replace('_', "") == folded
        })
    }
}

impl std::fmt::Display for SubjectType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.display_name())
    }
}

impl TryFrom<String> for SubjectType {
    type Error = String;
    fn try_from(s: String) -> Result<SubjectType, String> {
        SubjectType::parse(&s).ok_or_else(|| format!("unknown subject type {s:?}"))
    }
}

impl From<SubjectType> for String {
    fn from(t: SubjectType) -> String {
        t.display_name().to_string()
    }
}

/// One benchmark problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub problem_id: String,
    pub statement: String,
    pub subject_type: SubjectType,
    pub level: u8,
    pub ground_truth: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
}

/// Field-name mapping from the source JSONL to [`Problem`] fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldMap {
    pub problem_id: String,
    pub statement: String,
    pub subject_type: String,
    pub level: String,
    pub ground_truth: String,
    pub solution: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            problem_id: "unique_id".into(),
            statement: "problem".into(),
            subject_type: "subject".into(),
            level: "level".into(),
            ground_truth: "answer".into(),
            solution: "solution".into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Line {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("distribution mismatch: {0}")]
    Distribution(String),
}

/// Problems per difficulty level 1–5 in the expected 500-problem benchmark.
pub const LEVEL_COUNTS: [usize; 5] = [43, 90, 105, 128, 134];

/// Problems per subject type (ordered as [`SubjectType::ALL`]).
pub const TYPE_COUNTS: [usize; 7] = [124, 38, 41, 97, 62, 82, 56];

fn parse_level(value: &serde_json::Value) -> Option<u8> {
    match value {
        serde_json::Value::Number(n) => {
            let v = n.as_u64()?;
            u8::try_from(v).ok()
        }
        serde_json::Value::String(s) => {
            let trimmed = s.trim();
            let digits = trimmed.strip_prefix("Level ").unwrap_or(trimmed);
            digits.trim().parse().ok()
        }
        _ => None,
    }
}

/// Load a benchmark JSONL file. Each line must be a JSON object carrying the
/// mapped fields; a missing id field falls back to `problem_<line>`.
pub fn load_benchmark(path: &Path, map: &FieldMap) -> Result<Vec<Problem>, BenchError> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut problems = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| BenchError::Line {
            path: path.to_path_buf(),
            line: lineno,
            message,
        };
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| err(format!("invalid JSON: {e}")))?;
        let get_str = |field: &str| -> Option<String> {
            value
                .get(field)
                .and_then(|v| v.as_str())
                .map(str::to_string)
        };
        let problem_id = get_str(&map.problem_id).unwrap_or_else(|| format!("problem_{lineno}"));
        let statement = get_str(&map.statement)
            .ok_or_else(|| err(format!("missing field {:?}", map.statement)))?;
        let subject_raw = get_str(&map.subject_type)
            .ok_or_else(|| err(format!("missing field {:?}", map.subject_type)))?;
        let subject_type = SubjectType::parse(&subject_raw)
            .ok_or_else(|| err(format!("unknown subject type {subject_raw:?}")))?;
        let level_value = value
            .get(&map.level)
            .ok_or_else(|| err(format!("missing field {:?}", map.level)))?;
        let level = parse_level(level_value)
            .ok_or_else(|| err(format!("unparseable level {level_value}")))?;
        if !(1..=5).contains(&level) {
            return Err(err(format!("level {level} outside 1-5")));
        }
        let ground_truth = get_str(&map.ground_truth)
            .ok_or_else(|| err(format!("missing field {:?}", map.ground_truth)))?;
        if ground_truth.is_empty() {
            return Err(err("empty ground truth".into()));
        }
        problems.push(Problem {
            problem_id,
            statement,
            subject_type,
            level,
            ground_truth,
            solution: get_str(&map.solution),
        });
    }
    if problems.is_empty() {
        log::warn!("benchmark file {} contains no problems", path.display());
    }
    Ok(problems)
}

/// Histogram of problems per level (index 0 = level 1).
pub fn level_histogram(problems: &[Problem]) -> [usize; 5] {
    let mut out = [0usize; 5];
    for p in problems {
        out[(p.level - 1) as usize] += 1;
    }
    out
}

/// Histogram of problems per subject type, ordered as [`SubjectType::ALL`].
pub fn type_histogram(problems: &[Problem]) -> [usize; 7] {
    let mut out = [0usize; 7];
    for p in problems {
        out[p.subject_type.index()] += 1;
    }
    out
}

/// Check the full 500-problem distribution (level and type histograms).
pub fn validate_distribution(problems: &[Problem]) -> Result<(), BenchError> {
    if problems.len() != 500 {
        return Err(BenchError::Distribution(format!(
            "expected 500 problems, found {}",
            problems.len()
        )));
    }
    let levels = level_histogram(problems);
    if levels != LEVEL_COUNTS {
        return Err(BenchError::Distribution(format!(
            "level histogram {levels:?} != expected {LEVEL_COUNTS:?}"
        )));
    }
    let types = type_histogram(problems);
    if types != TYPE_COUNTS {
        let detail: BTreeMap<&str, (usize, usize)> = SubjectType::ALL
            .iter()
            .enumerate()
            .map(|(i, t)| (t.display_name(), (types[i], TYPE_COUNTS[i])))
            .collect();
        return Err(BenchError::Distribution(format!(
            "type histogram (found vs expected): {detail:?}"
        )));
    }
    Ok(())
}
