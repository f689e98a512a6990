//! Cross-encoder scoring of (problem, symbol) pairs, adaptive symbol
//! selection, and threshold-based problem filtering.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::gateway::{GatewayError, ScoringService};
use crate::retrieval::RankedCandidate;

/// Relevance score for one (problem, symbol) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub problem_id: String,
    pub symbol_id: String,
    pub score: f64,
}

/// How a problem's symbols were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleBranch {
    Top3,
    HighScore,
}

/// Symbols selected for one problem's prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub problem_id: String,
    pub selected_symbol_ids: Vec<String>,
    pub max_score: f64,
    pub rule_branch: RuleBranch,
}

#[derive(Debug, thiserror::Error)]
pub enum RerankError {
    #[error("scoring service: {0}")]
    Service(#[from] GatewayError),
    #[error("scoring service returned {got} scores for {expected} documents ({problem_id})")]
    CountMismatch {
        problem_id: String,
        expected: usize,
        got: usize,
    },
    #[error("score {score} outside [0,1] for pair ({problem_id}, {symbol_id})")]
    ScoreOutOfRange {
        problem_id: String,
        symbol_id: String,
        score: f64,
    },
}

/// Relevance threshold above which a symbol is considered a strong match.
pub const HIGH_SCORE_THRESHOLD: f64 = 0.7;

/// Minimum number of symbols selected when enough candidates exist.
pub const MIN_SELECTED: usize = 3;

/// Score one problem's candidate list in a single batched scoring call.
/// `documents` must align one-to-one with `candidates` (the description card
/// of each candidate symbol).
pub fn score_candidates(
    statement: &str,
    candidates: &[RankedCandidate],
    documents: &[String],
    scorer: &dyn ScoringService,
) -> Result<Vec<ScoredPair>, RerankError> {
    assert_eq!(
        candidates.len(),
        documents.len(),
        "one document per candidate"
    );
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let problem_id = candidates[0].problem_id.clone();
    let scores = scorer.score(statement, documents)?;
    if scores.len() != candidates.len() {
        return Err(RerankError::CountMismatch {
            problem_id,
            expected: candidates.len(),
            got: scores.len(),
        });
    }
    candidates
        .iter()
        .zip(scores)
        .map(|(c, score)| {
            if !(0.0..=1.0).contains(&score) || !score.is_finite() {
                return Err(RerankError::ScoreOutOfRange {
                    problem_id: c.problem_id.clone(),
                    symbol_id: c.symbol_id.clone(),
                    score,
                });
            }
            Ok(ScoredPair {
                problem_id: c.problem_id.clone(),
                symbol_id: c.symbol_id.clone(),
                score,
            })
        })
        .collect()
}

/// Apply the adaptive selection rule to one problem's scored pairs.
///
/// If more than [`MIN_SELECTED`] symbols score above [`HIGH_SCORE_THRESHOLD`],
/// exactly those are selected, strongest first. Otherwise the top-3 symbols in
/// RRF order are selected, and any high scorer outside that top-3 is appended
/// (strongest first) so that a score above the threshold always earns a slot.
pub fn select_symbols(pairs: &[ScoredPair], rrf_order: &[String]) -> SelectionResult {
    let problem_id = pairs
        .first()
        .map(|p| p.problem_id.clone())
        .unwrap_or_default();
    if pairs.len() < MIN_SELECTED {
        log::warn!(
            "problem {problem_id}: only {} candidates; selecting all",
            pairs.len()
        );
    }
    let max_score = pairs.iter().map(|p| p.score).fold(0.0f64, f64::max);
    let mut high: Vec<&ScoredPair> = pairs
        .iter()
        .filter(|p| p.score > HIGH_SCORE_THRESHOLD)
        .collect();
    high.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.symbol_id.cmp(&b.symbol_id))
    });
    if high.len() > MIN_SELECTED {
        return SelectionResult {
            problem_id,
            selected_symbol_ids: high.iter().map(|p| p.symbol_id.clone()).collect(),
            max_score,
            rule_branch: RuleBranch::HighScore,
        };
    }
    let scored_ids: BTreeSet<&str> = pairs.iter().map(|p| p.symbol_id.as_str()).collect();
    let mut selected: Vec<String> = rrf_order
        .iter()
        .filter(|id| scored_ids.contains(id.as_str()))
        .take(MIN_SELECTED)
        .cloned()
        .collect();
    for p in high {
        if !selected.iter().any(|s| s == &p.symbol_id) {
            selected.push(p.symbol_id.clone());
        }
    }
    SelectionResult {
        problem_id,
        selected_symbol_ids: selected,
        max_score,
        rule_branch: RuleBranch::Top3,
    }
}

/// Keep the problems whose maximum candidate score reaches the threshold,
/// preserving input order. Problems with no scored pairs are dropped with a
/// warning.
pub fn filter_problems_by_threshold(
    problem_ids: &[String],
    scores: &[ScoredPair],
    threshold: f64,
) -> Vec<String> {
    let mut max_by_problem: BTreeMap<&str, f64> = BTreeMap::new();
    for pair in scores {
        let entry = max_by_problem
            .entry(pair.problem_id.as_str())
            .or_insert(f64::MIN);
        *entry = entry.max(pair.score);
    }
    problem_ids
        .iter()
        .filter(|id| match max_by_problem.get(id.as_str()) {
            Some(max) => *max >= threshold,
            None => {
                log::warn!("problem {id} has no scored pairs; excluded from every threshold");
                false
            }
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mocks::{MockContext, MockScoringService, ScoringPolicy};

    fn pair(problem: &str, symbol: &str, score: f64) -> ScoredPair {
        ScoredPair {
            problem_id: problem.to_string(),
            symbol_id: symbol.to_string(),
            score,
        }
    }

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn more_than_three_high_scores_selects_exactly_those() {
        let pairs = vec![
            pair("p", "s1", 0.9),
            pair("p", "s2", 0.8),
            pair("p", "s3", 0.75),
            pair("p", "s4", 0.72),
            pair("p", "s5", 0.1),
        ];
        let rrf = strings(&["s5", "s4", "s3", "s2", "s1"]);
        let sel = select_symbols(&pairs, &rrf);
        assert_eq!(sel.rule_branch, RuleBranch::HighScore);
        assert_eq!(sel.selected_symbol_ids, strings(&["s1", "s2", "s3", "s4"]));
        assert!((sel.max_score - 0.9).abs() < 1e-12);
    }

    #[test]
    fn low_scores_select_top_three_by_rrf() {
        let pairs = vec![
            pair("p", "s1", 0.1),
            pair("p", "s2", 0.05),
            pair("p", "s3", 0.02),
            pair("p", "s4", 0.01),
        ];
        let rrf = strings(&["s2", "s4", "s1", "s3"]);
        let sel = select_symbols(&pairs, &rrf);
        assert_eq!(sel.rule_branch, RuleBranch::Top3);
        assert_eq!(sel.selected_symbol_ids, strings(&["s2", "s4", "s1"]));
        assert!((sel.max_score - 0.1).abs() < 1e-12);
    }

    #[test]
    fn high_scorer_outside_top_three_is_still_selected() {
        // one strong match ranked last by RRF: the top-3 branch must not drop it
        let pairs = vec![
            pair("p", "s1", 0.1),
            pair("p", "s2", 0.2),
            pair("p", "s3", 0.3),
            pair("p", "s4", 0.95),
        ];
        let rrf = strings(&["s1", "s2", "s3", "s4"]);
        let sel = select_symbols(&pairs, &rrf);
        assert_eq!(sel.rule_branch, RuleBranch::Top3);
        assert_eq!(sel.selected_symbol_ids, strings(&["s1", "s2", "s3", "s4"]));
    }

    #[test]
    fn fewer_than_three_candidates_selects_all() {
        let pairs = vec![pair("p", "s1", 0.4), pair("p", "s2", 0.3)];
        let rrf = strings(&["s1", "s2"]);
        let sel = select_symbols(&pairs, &rrf);
        assert_eq!(sel.selected_symbol_ids.len(), 2);
    }

    #[test]
    fn threshold_filter_keeps_max_at_or_above() {
        let scores = vec![
            pair("p1", "s1", 0.55),
            pair("p1", "s2", 0.2),
            pair("p2", "s1", 0.49),
            pair("p3", "s1", 0.5),
        ];
        let problems = strings(&["p1", "p2", "p3", "p4"]);
        assert_eq!(
            filter_problems_by_threshold(&problems, &scores, 0.5),
            strings(&["p1", "p3"])
        );
        assert_eq!(
            filter_problems_by_threshold(&problems, &scores, 0.0),
            strings(&["p1", "p2", "p3"])
        );
    }

    #[test]
    fn threshold_filter_is_monotone() {
        let scores: Vec<ScoredPair> = (0..50)
            .map(|i| pair(&format!("p{i:02}"), "s", i as f64 / 50.0))
            .collect();
        let problems: Vec<String> = (0..50).map(|i| format!("p{i:02}")).collect();
        let mut prev = filter_problems_by_threshold(&problems, &scores, 0.0);
        for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let cur = filter_problems_by_threshold(&problems, &scores, t);
            assert!(cur.len() <= prev.len());
            assert!(cur.iter().all(|p| prev.contains(p)));
            prev = cur;
        }
    }

    #[test]
    fn scoring_through_mock_matches_its_rule() {
        let ctx = MockContext::default();
        let scorer = MockScoringService::new(ScoringPolicy::KeywordOverlap, ctx.clone());
        let candidates = vec![
            RankedCandidate {
                problem_id: "p".into(),
                symbol_id: "sym/gcd".into(),
                bm25_rank: Some(1),
                dense_rank: Some(1),
                rrf_score: 1.0 / 61.0,
                rrf_rank: 1,
            },
            RankedCandidate {
                problem_id: "p".into(),
                symbol_id: "sym/det".into(),
                bm25_rank: None,
                dense_rank: Some(2),
                rrf_score: 0.5 / 62.0,
                rrf_rank: 2,
            },
        ];
        let docs = strings(&["gcd divisor", "matrix determinant"]);
        let pairs =
            score_candidates("compute the gcd divisor", &candidates, &docs, &scorer).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs[0].score > pairs[1].score);
        assert_eq!(pairs[0].symbol_id, "sym/gcd");
    }

    #[test]
    fn out_of_range_scores_are_a_hard_error() {
        struct Bad;
        impl ScoringService for Bad {
            fn score(&self, _q: &str, docs: &[String]) -> Result<Vec<f64>, GatewayError> {
                Ok(vec![1.5; docs.len()])
            }
            fn model_tag(&self) -> String {
                "bad".into()
            }
        }
        let candidates = vec![RankedCandidate {
            problem_id: "p".into(),
            symbol_id: "s".into(),
            bm25_rank: None,
            dense_rank: Some(1),
            rrf_score: 0.01,
            rrf_rank: 1,
        }];
        let err = score_candidates("q", &candidates, &strings(&["doc"]), &Bad).unwrap_err();
        assert!(matches!(err, RerankError::ScoreOutOfRange { .. }));
    }

    #[test]
    fn selection_superset_property_on_random_cases() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..500 {
            let n = rng.random_range(1..=12);
            let pairs: Vec<ScoredPair> = (0..n)
                .map(|i| {
                    pair(
                        &format!("p{case}"),
                        &format!("s{i}"),
                        rng.random_range(0.0..1.0),
                    )
                })
                .collect();
            let mut rrf: Vec<String> = pairs.iter().map(|p| p.symbol_id.clone()).collect();
            // shuffle RRF order deterministically
            for i in (1..rrf.len()).rev() {
                let j = rng.random_range(0..=i);
                rrf.swap(i, j);
            }
            let sel = select_symbols(&pairs, &rrf);
            for p in &pairs {
                if p.score > HIGH_SCORE_THRESHOLD {
                    assert!(
                        sel.selected_symbol_ids.contains(&p.symbol_id),
                        "case {case}: high scorer dropped"
                    );
                }
            }
            assert!(sel.selected_symbol_ids.len() >= MIN_SELECTED.min(pairs.len()));
        }
    }
}
