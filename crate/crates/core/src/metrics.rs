//! Evaluation metrics over inference records and reranker scores.
//!
//! Per (model, mode, threshold): accuracy for each prompting condition,
//! accuracy delta in percentage points, mean attempts (best-of-n only),
//! attempts ratio, and attempts delta. Slice matrices break the deltas down
//! by difficulty level and subject type against the threshold axis. Coverage
//! reporting buckets each problem by its maximum reranker score.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{Problem, SubjectType};
use crate::inference::{format_threshold, Condition, InferenceMode, InferenceRecord};
use crate::rerank::ScoredPair;
use crate::util::{self, UtilError};

/// Coverage bucket boundaries: high is `[0.5, 1.0]`, medium is `[0.2, 0.5)`,
/// poor is `[0.0, 0.2)`. The half-open medium interval makes the partition
/// total.
pub const HIGH_COVERAGE_MIN: f64 = 0.5;
pub const POOR_COVERAGE_MAX: f64 = 0.2;

/// Cells with fewer samples than this are flagged `low_n` in reports.
pub const LOW_N_CUTOFF: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("attempts metrics require best-of-n records, got a greedy record for {problem_id}")]
    GreedyAttempts { problem_id: String },
    #[error(
        "baseline and openmath cover different problem sets for {model_tag}/{mode}/T{threshold} \
         (baseline-only: {baseline_only}, openmath-only: {openmath_only})"
    )]
    ProblemSetMismatch {
        model_tag: String,
        mode: String,
        threshold: String,
        baseline_only: usize,
        openmath_only: usize,
    },
    #[error(
        "duplicate record for problem {problem_id} in {model_tag}/{condition}/{mode}/T{threshold}"
    )]
    DuplicateRecord {
        problem_id: String,
        model_tag: String,
        condition: String,
        mode: String,
        threshold: String,
    },
    #[error("record references unknown problem id {problem_id}")]
    UnknownProblem { problem_id: String },
    #[error(transparent)]
    Util(#[from] UtilError),
    #[error("failed writing {path}: {source}")]
    Csv { path: String, source: csv::Error },
}

// ---------------------------------------------------------------------------
// Scalar metrics
// ---------------------------------------------------------------------------

/// Fraction of records marked correct; `None` on empty input.
pub fn accuracy(records: &[InferenceRecord]) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    let correct = records.iter().filter(|r| r.correct).count();
    Some(correct as f64 / records.len() as f64)
}

/// Accuracy delta in percentage points: `100·(openmath − baseline)`.
/// Absent when either input is absent.
pub fn delta_accuracy(openmath: Option<f64>, baseline: Option<f64>) -> Option<f64> {
    Some(100.0 * (openmath? - baseline?))
}

/// Mean of `attempts_used`; `None` on empty input. Greedy records are a hard
/// error: a single-attempt run carries no convergence information.
pub fn mean_attempts(records: &[InferenceRecord]) -> Result<Option<f64>, MetricsError> {
    if let Some(r) = records.iter().find(|r| r.mode == InferenceMode::Greedy) {
        return Err(MetricsError::GreedyAttempts {
            problem_id: r.problem_id.clone(),
        });
    }
    if records.is_empty() {
        return Ok(None);
    }
    let total: u64 = records.iter().map(|r| u64::from(r.attempts_used)).sum();
    Ok(Some(total as f64 / records.len() as f64))
}

/// `baseline_mean / openmath_mean`; ratios above 1.0 mean the augmented
/// condition converged faster. Absent when either input is absent or the
/// denominator is not positive.
pub fn attempts_ratio(baseline: Option<f64>, openmath: Option<f64>) -> Option<f64> {
    let (b, o) = (baseline?, openmath?);
    (o > 0.0).then(|| b / o)
}

/// `openmath_mean − baseline_mean`; negative values mean fewer attempts under
/// the augmented condition.
pub fn delta_attempts(openmath: Option<f64>, baseline: Option<f64>) -> Option<f64> {
    Some(openmath? - baseline?)
}

// ---------------------------------------------------------------------------
// Report structures
// ---------------------------------------------------------------------------

/// Headline metrics for one (model, mode, threshold) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub model_tag: String,
    pub mode: InferenceMode,
    pub threshold: f64,
    /// Problems per condition (baseline and openmath cover the same set).
    pub n_problems: usize,
    pub accuracy_baseline: Option<f64>,
    pub accuracy_openmath: Option<f64>,
    pub delta_accuracy_pp: Option<f64>,
    pub attempts_baseline: Option<f64>,
    pub attempts_openmath: Option<f64>,
    pub attempts_ratio: Option<f64>,
    pub delta_attempts: Option<f64>,
}

/// One populated matrix cell; cells with zero samples are absent instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceCell {
    pub n: usize,
    pub value: f64,
    pub low_n: bool,
}

/// Row-label × threshold matrix of one delta metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceMatrix {
    /// "level" or "type".
    pub row_axis: String,
    pub rows: Vec<String>,
    /// Ascending, formatted with one decimal minimum ("0.0", "0.9").
    pub thresholds: Vec<String>,
    /// `cells[row][col]`; `None` marks an empty slice.
    pub cells: Vec<Vec<Option<SliceCell>>>,
}

/// Slice matrices for one (model, mode) pair. Attempts matrices exist only
/// for best-of-n runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeMatrices {
    pub model_tag: String,
    pub mode: InferenceMode,
    pub delta_accuracy_by_level: SliceMatrix,
    pub delta_accuracy_by_type: SliceMatrix,
    pub delta_attempts_by_level: Option<SliceMatrix>,
    pub delta_attempts_by_type: Option<SliceMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Sorted by (model_tag, mode, threshold).
    pub summaries: Vec<ConditionSummary>,
    /// Sorted by (model_tag, mode).
    pub groups: Vec<ModeMatrices>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageBucket {
    High,
    Medium,
    Poor,
}

/// Bucket for a problem's maximum reranker score.
pub fn coverage_bucket(max_score: f64) -> CoverageBucket {
    if max_score >= HIGH_COVERAGE_MIN {
        CoverageBucket::High
    } else if max_score >= POOR_COVERAGE_MAX {
        CoverageBucket::Medium
    } else {
        CoverageBucket::Poor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemCoverage {
    pub problem_id: String,
    pub max_score: f64,
    pub bucket: CoverageBucket,
}

/// Count matrix over subject types (rows) × levels 1–5 (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

/// Per-type coverage aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCoverage {
    pub subject_type: String,
    pub n: usize,
    pub high_count: usize,
    pub high_pct: f64,
    pub poor_count: usize,
    pub poor_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Problems with at least one scored pair.
    pub n_problems: usize,
    /// Problems dropped for having no scored pairs.
    pub excluded: usize,
    pub high_count: usize,
    pub medium_count: usize,
    pub poor_count: usize,
    pub high_pct: f64,
    pub medium_pct: f64,
    pub poor_pct: f64,
    pub mean_max_score: f64,
    /// Benchmark order.
    pub per_problem: Vec<ProblemCoverage>,
    /// Ordered as the canonical subject-type list.
    pub by_type: Vec<TypeCoverage>,
    pub high_matrix: CountMatrix,
    pub poor_matrix: CountMatrix,
}

/// Everything the evaluate stage emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub metrics: MetricsReport,
    pub coverage: Option<CoverageReport>,
}

// ---------------------------------------------------------------------------
// Report construction
// ---------------------------------------------------------------------------

type GroupKey = (String, String, String); // (model_tag, mode file_str, threshold string)

struct Group {
    model_tag: String,
    mode: InferenceMode,
    threshold: f64,
    baseline: Vec<InferenceRecord>,
    openmath: Vec<InferenceRecord>,
}

fn group_records(records: &[InferenceRecord]) -> Result<BTreeMap<GroupKey, Group>, MetricsError> {
    let mut groups: BTreeMap<GroupKey, Group> = BTreeMap::new();
    let mut seen: BTreeSet<(GroupKey, Condition, String)> = BTreeSet::new();
    for r in records {
        let key: GroupKey = (
            r.model_tag.clone(),
            r.mode.file_str().to_string(),
            format_threshold(r.threshold),
        );
        if !seen.insert((key.clone(), r.condition, r.problem_id.clone())) {
            return Err(MetricsError::DuplicateRecord {
                problem_id: r.problem_id.clone(),
                model_tag: key.0,
                condition: r.condition.as_str().to_string(),
                mode: key.1,
                threshold: key.2,
            });
        }
        let group = groups.entry(key).or_insert_with(|| Group {
            model_tag: r.model_tag.clone(),
            mode: r.mode,
            threshold: r.threshold,
            baseline: Vec::new(),
            openmath: Vec::new(),
        });
        match r.condition {
            Condition::Baseline => group.baseline.push(r.clone()),
            Condition::Openmath => group.openmath.push(r.clone()),
        }
    }
    for group in groups.values() {
        let base_ids: BTreeSet<&str> = group
            .baseline
            .iter()
            .map(|r| r.problem_id.as_str())
            .collect();
        let om_ids: BTreeSet<&str> = group
            .openmath
            .iter()
            .map(|r| r.problem_id.as_str())
            .collect();
        if base_ids != om_ids {
            return Err(MetricsError::ProblemSetMismatch {
                model_tag: group.model_tag.clone(),
                mode: group.mode.file_str().to_string(),
                threshold: format_threshold(group.threshold),
                baseline_only: base_ids.difference(&om_ids).count(),
                openmath_only: om_ids.difference(&base_ids).count(),
            });
        }
    }
    Ok(groups)
}

fn summarize_group(group: &Group) -> Result<ConditionSummary, MetricsError> {
    let accuracy_baseline = accuracy(&group.baseline);
    let accuracy_openmath = accuracy(&group.openmath);
    let (attempts_baseline, attempts_openmath) = if group.mode == InferenceMode::BestOfN {
        (
            mean_attempts(&group.baseline)?,
            mean_attempts(&group.openmath)?,
        )
    } else {
        (None, None)
    };
    Ok(ConditionSummary {
        model_tag: group.model_tag.clone(),
        mode: group.mode,
        threshold: group.threshold,
        n_problems: group.baseline.len(),
        accuracy_baseline,
        accuracy_openmath,
        delta_accuracy_pp: delta_accuracy(accuracy_openmath, accuracy_baseline),
        attempts_baseline,
        attempts_openmath,
        attempts_ratio: attempts_ratio(attempts_baseline, attempts_openmath),
        delta_attempts: delta_attempts(attempts_openmath, attempts_baseline),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SliceAxis {
    Level,
    Type,
}

impl SliceAxis {
    fn name(self) -> &'static str {
        match self {
            SliceAxis::Level => "level",
            SliceAxis::Type => "type",
        }
    }

    fn rows(self) -> Vec<String> {
        match self {
            SliceAxis::Level => (1..=5).map(|l| l.to_string()).collect(),
            SliceAxis::Type => SubjectType::ALL
                .iter()
                .map(|t| t.display_name().to_string())
                .collect(),
        }
    }

    fn row_index(self, problem: &Problem) -> usize {
        match self {
            SliceAxis::Level => problem.level as usize - 1,
            SliceAxis::Type => problem.subject_type.index(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SliceMetric {
    DeltaAccuracy,
    DeltaAttempts,
}

/// Build one delta matrix for the (model, mode) groups in `groups`
/// (all sharing a mode), columns ordered by ascending threshold.
fn build_matrix(
    groups: &[&Group],
    axis: SliceAxis,
    metric: SliceMetric,
    problem_index: &BTreeMap<&str, &Problem>,
) -> Result<SliceMatrix, MetricsError> {
    let mut sorted: Vec<&&Group> = groups.iter().collect();
    sorted.sort_by(|a, b| a.threshold.total_cmp(&b.threshold));
    let rows = axis.rows();
    let thresholds: Vec<String> = sorted
        .iter()
        .map(|g| format_threshold(g.threshold))
        .collect();
    let mut cells: Vec<Vec<Option<SliceCell>>> = vec![vec![None; sorted.len()]; rows.len()];

    for (col, group) in sorted.iter().enumerate() {
        // Partition both conditions by the row attribute of their problem.
        let mut base_rows: Vec<Vec<&InferenceRecord>> = vec![Vec::new(); rows.len()];
        let mut om_rows: Vec<Vec<&InferenceRecord>> = vec![Vec::new(); rows.len()];
        for (records, split) in [
            (&group.baseline, &mut base_rows),
            (&group.openmath, &mut om_rows),
        ] {
            for r in records {
                let problem = problem_index.get(r.problem_id.as_str()).ok_or_else(|| {
                    MetricsError::UnknownProblem {
                        problem_id: r.problem_id.clone(),
                    }
                })?;
                split[axis.row_index(problem)].push(r);
            }
        }
        for (row, (base, om)) in base_rows.iter().zip(&om_rows).enumerate() {
            let n = base.len();
            if n == 0 {
                continue;
            }
            let base_owned: Vec<InferenceRecord> = base.iter().map(|r| (*r).clone()).collect();
            let om_owned: Vec<InferenceRecord> = om.iter().map(|r| (*r).clone()).collect();
            let value = match metric {
                SliceMetric::DeltaAccuracy => {
                    delta_accuracy(accuracy(&om_owned), accuracy(&base_owned))
                }
                SliceMetric::DeltaAttempts => {
                    delta_attempts(mean_attempts(&om_owned)?, mean_attempts(&base_owned)?)
                }
            };
            if let Some(value) = value {
                cells[row][col] = Some(SliceCell {
                    n,
                    value,
                    low_n: n < LOW_N_CUTOFF,
                });
            }
        }
    }
    Ok(SliceMatrix {
        row_axis: axis.name().to_string(),
        rows,
        thresholds,
        cells,
    })
}

/// Aggregate inference records into the full metrics report. Requires every
/// record's problem to appear in `problems` and, per (model, mode, threshold),
/// identical baseline/openmath problem sets.
pub fn build_metrics_report(
    records: &[InferenceRecord],
    problems: &[Problem],
) -> Result<MetricsReport, MetricsError> {
    let problem_index: BTreeMap<&str, &Problem> = problems
        .iter()
        .map(|p| (p.problem_id.as_str(), p))
        .collect();
    let groups = group_records(records)?;

    let mut summaries = Vec::new();
    for group in groups.values() {
        summaries.push(summarize_group(group)?);
    }
    summaries.sort_by(|a, b| {
        (&a.model_tag, a.mode.file_str())
            .cmp(&(&b.model_tag, b.mode.file_str()))
            .then(a.threshold.total_cmp(&b.threshold))
    });

    // Matrices per (model, mode), thresholds as columns.
    let mut by_mode: BTreeMap<(String, String), Vec<&Group>> = BTreeMap::new();
    for group in groups.values() {
        by_mode
            .entry((group.model_tag.clone(), group.mode.file_str().to_string()))
            .or_default()
            .push(group);
    }
    let mut matrices = Vec::new();
    for ((model_tag, _), members) in &by_mode {
        let mode = members[0].mode;
        let delta_attempts_pair = if mode == InferenceMode::BestOfN {
            (
                Some(build_matrix(
                    members,
                    SliceAxis::Level,
                    SliceMetric::DeltaAttempts,
                    &problem_index,
                )?),
                Some(build_matrix(
                    members,
                    SliceAxis::Type,
                    SliceMetric::DeltaAttempts,
                    &problem_index,
                )?),
            )
        } else {
            (None, None)
        };
        matrices.push(ModeMatrices {
            model_tag: model_tag.clone(),
            mode,
            delta_accuracy_by_level: build_matrix(
                members,
                SliceAxis::Level,
                SliceMetric::DeltaAccuracy,
                &problem_index,
            )?,
            delta_accuracy_by_type: build_matrix(
                members,
                SliceAxis::Type,
                SliceMetric::DeltaAccuracy,
                &problem_index,
            )?,
            delta_attempts_by_level: delta_attempts_pair.0,
            delta_attempts_by_type: delta_attempts_pair.1,
        });
    }
    Ok(MetricsReport {
        summaries,
        groups: matrices,
    })
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

/// Bucket every problem by its maximum reranker score. Problems without any
/// scored pair are excluded with a warning.
pub fn coverage_report(scores: &[ScoredPair], problems: &[Problem]) -> CoverageReport {
    let mut max_by_problem: BTreeMap<&str, f64> = BTreeMap::new();
    for pair in scores {
        let entry = max_by_problem
            .entry(pair.problem_id.as_str())
            .or_insert(f64::NEG_INFINITY);
        if pair.score > *entry {
            *entry = pair.score;
        }
    }

    let type_names: Vec<String> = SubjectType::ALL
        .iter()
        .map(|t| t.display_name().to_string())
        .collect();
    let level_names: Vec<String> = (1..=5).map(|l| l.to_string()).collect();
    let mut high_counts = vec![vec![0usize; 5]; SubjectType::ALL.len()];
    let mut poor_counts = vec![vec![0usize; 5]; SubjectType::ALL.len()];
    let mut per_type_n = vec![0usize; SubjectType::ALL.len()];
    let mut per_type_high = vec![0usize; SubjectType::ALL.len()];
    let mut per_type_poor = vec![0usize; SubjectType::ALL.len()];

    let mut per_problem = Vec::new();
    let mut excluded = 0usize;
    let (mut high, mut medium, mut poor) = (0usize, 0usize, 0usize);
    let mut sum = 0.0f64;
    for problem in problems {
        let Some(&max_score) = max_by_problem.get(problem.problem_id.as_str()) else {
            log::warn!(
                "coverage: no scored pairs for problem {}; excluded",
                problem.problem_id
            );
            excluded += 1;
            continue;
        };
        let bucket = coverage_bucket(max_score);
        sum += max_score;
        let ti = problem.subject_type.index();
        let li = problem.level as usize - 1;
        per_type_n[ti] += 1;
        match bucket {
            CoverageBucket::High => {
                high += 1;
                high_counts[ti][li] += 1;
                per_type_high[ti] += 1;
            }
            CoverageBucket::Medium => medium += 1,
            CoverageBucket::Poor => {
                poor += 1;
                poor_counts[ti][li] += 1;
                per_type_poor[ti] += 1;
            }
        }
        per_problem.push(ProblemCoverage {
            problem_id: problem.problem_id.clone(),
            max_score,
            bucket,
        });
    }

    let n = per_problem.len();
    let pct = |count: usize| {
        if n == 0 {
            0.0
        } else {
            100.0 * count as f64 / n as f64
        }
    };
    let by_type = SubjectType::ALL
        .iter()
        .enumerate()
        .map(|(i, t)| TypeCoverage {
            subject_type: t.display_name().to_string(),
            n: per_type_n[i],
            high_count: per_type_high[i],
            high_pct: if per_type_n[i] == 0 {
                0.0
            } else {
                100.0 * per_type_high[i] as f64 / per_type_n[i] as f64
            },
            poor_count: per_type_poor[i],
            poor_pct: if per_type_n[i] == 0 {
                0.0
            } else {
                100.0 * per_type_poor[i] as f64 / per_type_n[i] as f64
            },
        })
        .collect();

    CoverageReport {
        n_problems: n,
        excluded,
        high_count: high,
        medium_count: medium,
        poor_count: poor,
        high_pct: pct(high),
        medium_pct: pct(medium),
        poor_pct: pct(poor),
        mean_max_score: if n == 0 { 0.0 } else { sum / n as f64 },
        per_problem,
        by_type,
        high_matrix: CountMatrix {
            rows: type_names.clone(),
            cols: level_names.clone(),
            counts: high_counts,
        },
        poor_matrix: CountMatrix {
            rows: type_names,
            cols: level_names,
            counts: poor_counts,
        },
    }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

fn format_cell(value: f64) -> String {
    format!("{value:.4}")
}

/// One CSV across all (model, mode) groups for a given matrix selector.
/// Columns: model, mode, <axis>, then per threshold `delta_T<t>` and `n_T<t>`.
fn write_matrix_csv(
    path: &Path,
    groups: &[(&str, &str, &SliceMatrix)],
    axis: &str,
) -> Result<(), MetricsError> {
    let mut thresholds: Vec<String> = groups
        .iter()
        .flat_map(|(_, _, m)| m.thresholds.iter().cloned())
        .collect();
    thresholds.sort_by(|a, b| {
        a.parse::<f64>()
            .unwrap_or(f64::MAX)
            .total_cmp(&b.parse::<f64>().unwrap_or(f64::MAX))
    });
    thresholds.dedup();

    let csv_err = |source| MetricsError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(|source| MetricsError::Csv {
        path: path.display().to_string(),
        source,
    })?;
    let mut header = vec!["model".to_string(), "mode".to_string(), axis.to_string()];
    for t in &thresholds {
        header.push(format!("delta_T{t}"));
        header.push(format!("n_T{t}"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for (model, mode, matrix) in groups {
        let col_of: BTreeMap<&str, usize> = matrix
            .thresholds
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        for (ri, row) in matrix.rows.iter().enumerate() {
            let mut record = vec![model.to_string(), mode.to_string(), row.clone()];
            for t in &thresholds {
                match col_of
                    .get(t.as_str())
                    .and_then(|&ci| matrix.cells[ri][ci].as_ref())
                {
                    Some(cell) => {
                        record.push(format_cell(cell.value));
                        record.push(cell.n.to_string());
                    }
                    None => {
                        record.push(String::new());
                        record.push(String::new());
                    }
                }
            }
            w.write_record(&record).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| MetricsError::Csv {
        path: path.display().to_string(),
        source: csv::Error::from(e),
    })?;
    Ok(())
}

fn write_count_matrix_csv(path: &Path, matrix: &CountMatrix) -> Result<(), MetricsError> {
    let csv_err = |source| MetricsError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(|source| MetricsError::Csv {
        path: path.display().to_string(),
        source,
    })?;
    let mut header = vec!["type".to_string()];
    header.extend(matrix.cols.iter().map(|c| format!("level_{c}")));
    header.push("total".to_string());
    w.write_record(&header).map_err(csv_err)?;
    for (row, counts) in matrix.rows.iter().zip(&matrix.counts) {
        let mut record = vec![row.clone()];
        record.extend(counts.iter().map(|c| c.to_string()));
        record.push(counts.iter().sum::<usize>().to_string());
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|e| MetricsError::Csv {
        path: path.display().to_string(),
        source: csv::Error::from(e),
    })?;
    Ok(())
}

fn write_coverage_csvs(
    out_dir: &Path,
    cov: &CoverageReport,
    written: &mut Vec<PathBuf>,
) -> Result<(), MetricsError> {
    let summary_path = out_dir.join("coverage_summary.csv");
    {
        let csv_err = |source| MetricsError::Csv {
            path: summary_path.display().to_string(),
            source,
        };
        let mut w = csv::Writer::from_path(&summary_path).map_err(|source| MetricsError::Csv {
            path: summary_path.display().to_string(),
            source,
        })?;
        w.write_record(["stat", "value"]).map_err(csv_err)?;
        let rows: Vec<(&str, String)> = vec![
            ("n_problems", cov.n_problems.to_string()),
            ("excluded", cov.excluded.to_string()),
            ("high_count", cov.high_count.to_string()),
            ("high_pct", format_cell(cov.high_pct)),
            ("medium_count", cov.medium_count.to_string()),
            ("medium_pct", format_cell(cov.medium_pct)),
            ("poor_count", cov.poor_count.to_string()),
            ("poor_pct", format_cell(cov.poor_pct)),
            ("mean_max_score", format_cell(cov.mean_max_score)),
        ];
        for (stat, value) in rows {
            w.write_record([stat, value.as_str()]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| MetricsError::Csv {
            path: summary_path.display().to_string(),
            source: csv::Error::from(e),
        })?;
    }
    written.push(summary_path);

    let by_type_path = out_dir.join("coverage_by_type.csv");
    {
        let csv_err = |source| MetricsError::Csv {
            path: by_type_path.display().to_string(),
            source,
        };
        let mut w = csv::Writer::from_path(&by_type_path).map_err(|source| MetricsError::Csv {
            path: by_type_path.display().to_string(),
            source,
        })?;
        w.write_record([
            "type",
            "n",
            "high_count",
            "high_pct",
            "poor_count",
            "poor_pct",
        ])
        .map_err(csv_err)?;
        for row in &cov.by_type {
            w.write_record([
                row.subject_type.as_str(),
                &row.n.to_string(),
                &row.high_count.to_string(),
                &format_cell(row.high_pct),
                &row.poor_count.to_string(),
                &format_cell(row.poor_pct),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| MetricsError::Csv {
            path: by_type_path.display().to_string(),
            source: csv::Error::from(e),
        })?;
    }
    written.push(by_type_path);

    let high_path = out_dir.join("coverage_high_by_type_level.csv");
    write_count_matrix_csv(&high_path, &cov.high_matrix)?;
    written.push(high_path);
    let poor_path = out_dir.join("coverage_poor_by_type_level.csv");
    write_count_matrix_csv(&poor_path, &cov.poor_matrix)?;
    written.push(poor_path);
    Ok(())
}

/// Write `report.json` plus one heatmap-ready CSV per matrix into `out_dir`.
/// Returns the paths written, `report.json` first.
pub fn emit_report(
    report: &EvaluationReport,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, MetricsError> {
    std::fs::create_dir_all(out_dir).map_err(|source| UtilError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let json_path = out_dir.join("report.json");
    util::write_json(&json_path, report)?;
    written.push(json_path);

    type MatrixGroups<'a> = Vec<(&'a str, &'a str, &'a SliceMatrix)>;
    let select = |f: fn(&ModeMatrices) -> Option<&SliceMatrix>| -> MatrixGroups<'_> {
        report
            .metrics
            .groups
            .iter()
            .filter_map(|g| f(g).map(|m| (g.model_tag.as_str(), g.mode.file_str(), m)))
            .collect()
    };
    let targets: [(&str, &str, MatrixGroups); 4] = [
        (
            "delta_accuracy_by_level.csv",
            "level",
            select(|g| Some(&g.delta_accuracy_by_level)),
        ),
        (
            "delta_accuracy_by_type.csv",
            "type",
            select(|g| Some(&g.delta_accuracy_by_type)),
        ),
        (
            "delta_attempts_by_level.csv",
            "level",
            select(|g| g.delta_attempts_by_level.as_ref()),
        ),
        (
            "delta_attempts_by_type.csv",
            "type",
            select(|g| g.delta_attempts_by_type.as_ref()),
        ),
    ];
    for (name, axis, groups) in &targets {
        let path = out_dir.join(name);
        write_matrix_csv(&path, groups, axis)?;
        written.push(path);
    }

    if let Some(cov) = &report.coverage {
        write_coverage_csvs(out_dir, cov, &mut written)?;
    }
    Ok(written)
}
