//! Expansion of the released per-problem maximum relevance scores into full
//! candidate lists with per-pair scores.
//!
//! The frozen table pins, for each of the 500 problems, the maximum
//! cross-encoder score over its candidates and whether the problem has
//! exactly four candidates above the high-score threshold. This module
//! expands each row into 50 scored candidates consistent with those two
//! facts: the maximum always sits at fused rank 1, four-high rows place
//! exactly four scores above the threshold, and every other row keeps ranks
//! 2+ strictly below it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::released_table::RELEASED_MAX_SCORES;
use crate::bench::SubjectType;
use crate::rerank::ScoredPair;
use crate::retrieval::RankedCandidate;

/// Seed for the candidate-assignment stream.
const SCORE_SEED: u64 = 0x7265_7261_6e6b_3031;

/// Candidates per problem.
const CANDIDATES_PER_PROBLEM: usize = 50;

/// One row of the released score table, decoded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleasedRow {
    pub subject_type: SubjectType,
    pub level: u8,
    /// Maximum cross-encoder score over the problem's candidates.
    pub max_score: f64,
    /// Whether exactly four candidates score above the high threshold.
    pub four_high: bool,
}

/// Decode the frozen table.
pub fn released_rows() -> Vec<ReleasedRow> {
    RELEASED_MAX_SCORES
        .iter()
        .map(|&(subject_idx, level, scaled, four_high)| ReleasedRow {
            subject_type: SubjectType::ALL[subject_idx as usize],
            level,
            max_score: f64::from(scaled) / 10_000.0,
            four_high,
        })
        .collect()
}

/// Fully expanded candidate lists and scores, flattened in problem order.
#[derive(Debug, Clone)]
pub struct ReleasedScoreSet {
    pub candidates: Vec<RankedCandidate>,
    pub pairs: Vec<ScoredPair>,
}

fn mix(seed: u64, a: u64) -> u64 {
    seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Score for the candidate at fused rank `j` (0-based) of a row.
fn score_at(row: &ReleasedRow, j: usize) -> f64 {
    let max = row.max_score;
    if j == 0 {
        return max;
    }
    if row.four_high && j <= 3 {
        // three more scores strictly inside (threshold, max)
        return 0.7 + (max - 0.7) * (4 - j) as f64 / 4.0;
    }
    let ceiling = if row.four_high {
        0.63
    } else {
        (max * 0.9).min(0.65)
    };
    ceiling * (CANDIDATES_PER_PROBLEM - j) as f64 / CANDIDATES_PER_PROBLEM as f64
}

/// Expand the table for the given problems, drawing candidate symbols from
/// `symbol_pool`. `problem_ids` must align with the table (one id per row);
/// the pool needs at least 50 entries.
pub fn released_scores(problem_ids: &[String], symbol_pool: &[String]) -> ReleasedScoreSet {
    let rows = released_rows();
    assert_eq!(problem_ids.len(), rows.len(), "one problem per table row");
    assert!(
        symbol_pool.len() >= CANDIDATES_PER_PROBLEM,
        "pool too small"
    );
    let mut candidates = Vec::with_capacity(rows.len() * CANDIDATES_PER_PROBLEM);
    let mut pairs = Vec::with_capacity(rows.len() * CANDIDATES_PER_PROBLEM);
    for (i, (row, problem_id)) in rows.iter().zip(problem_ids).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(SCORE_SEED, i as u64));
        let mut picked: Vec<usize> = Vec::with_capacity(CANDIDATES_PER_PROBLEM);
        while picked.len() < CANDIDATES_PER_PROBLEM {
            let idx = rng.random_range(0..symbol_pool.len());
            if !picked.contains(&idx) {
                picked.push(idx);
            }
        }
        for (j, &idx) in picked.iter().enumerate() {
            let symbol_id = symbol_pool[idx].clone();
            candidates.push(RankedCandidate {
                problem_id: problem_id.clone(),
                symbol_id: symbol_id.clone(),
                bm25_rank: Some(j + 1),
                dense_rank: Some(j + 1),
                rrf_score: 2.0 / (61.0 + j as f64),
                rrf_rank: j + 1,
            });
            pairs.push(ScoredPair {
                problem_id: problem_id.clone(),
                symbol_id,
                score: score_at(row, j),
            });
        }
    }
    ReleasedScoreSet { candidates, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rerank::{filter_problems_by_threshold, select_symbols, HIGH_SCORE_THRESHOLD};

    fn fixture() -> (Vec<String>, ReleasedScoreSet) {
        let ids: Vec<String> = (1..=500).map(|i| format!("math500_{i:04}")).collect();
        let pool: Vec<String> = (0..200)
            .map(|i| format!("cd{}:sym{}", i / 8, i % 8))
            .collect();
        let set = released_scores(&ids, &pool);
        (ids, set)
    }

    #[test]
    fn shape_and_ranges() {
        let (_ids, set) = fixture();
        assert_eq!(set.candidates.len(), 500 * CANDIDATES_PER_PROBLEM);
        assert_eq!(set.pairs.len(), 500 * CANDIDATES_PER_PROBLEM);
        assert!(set.pairs.iter().all(|p| (0.0..=1.0).contains(&p.score)));
        for (c, p) in set.candidates.iter().zip(&set.pairs) {
            assert_eq!(c.problem_id, p.problem_id);
            assert_eq!(c.symbol_id, p.symbol_id);
        }
    }

    #[test]
    fn per_problem_max_matches_table_and_sits_at_rank_one() {
        let (ids, set) = fixture();
        let rows = released_rows();
        for (i, id) in ids.iter().enumerate() {
            let chunk = &set.pairs[i * CANDIDATES_PER_PROBLEM..(i + 1) * CANDIDATES_PER_PROBLEM];
            assert!(chunk.iter().all(|p| &p.problem_id == id));
            let max = chunk.iter().map(|p| p.score).fold(f64::MIN, f64::max);
            assert!(
                (max - rows[i].max_score).abs() < 1e-12,
                "problem {i}: max {max} vs table {}",
                rows[i].max_score
            );
            assert_eq!(chunk[0].score, max);
            let high = chunk
                .iter()
                .filter(|p| p.score > HIGH_SCORE_THRESHOLD)
                .count();
            let expected = if rows[i].four_high {
                4
            } else {
                usize::from(rows[i].max_score > HIGH_SCORE_THRESHOLD)
            };
            assert_eq!(high, expected, "problem {i}");
        }
    }

    #[test]
    fn candidate_ids_are_distinct_per_problem() {
        let (_ids, set) = fixture();
        for chunk in set.candidates.chunks(CANDIDATES_PER_PROBLEM) {
            let distinct: std::collections::BTreeSet<&str> =
                chunk.iter().map(|c| c.symbol_id.as_str()).collect();
            assert_eq!(distinct.len(), CANDIDATES_PER_PROBLEM);
            for (j, c) in chunk.iter().enumerate() {
                assert_eq!(c.rrf_rank, j + 1);
            }
        }
    }

    #[test]
    fn selection_retains_1543_pairs() {
        let (_ids, set) = fixture();
        let mut retained = 0usize;
        let mut four = 0usize;
        for (cands, pairs) in set
            .candidates
            .chunks(CANDIDATES_PER_PROBLEM)
            .zip(set.pairs.chunks(CANDIDATES_PER_PROBLEM))
        {
            let rrf_order: Vec<String> = cands.iter().map(|c| c.symbol_id.clone()).collect();
            let sel = select_symbols(pairs, &rrf_order);
            retained += sel.selected_symbol_ids.len();
            if sel.selected_symbol_ids.len() == 4 {
                four += 1;
            }
        }
        assert_eq!(four, 43);
        assert_eq!(retained, 43 * 4 + 457 * 3);
    }

    #[test]
    fn threshold_counts_match_released_statistics() {
        let (ids, set) = fixture();
        for (threshold, expected) in [
            (0.0, 500),
            (0.1, 201),
            (0.3, 151),
            (0.5, 121),
            (0.7, 105),
            (0.9, 75),
        ] {
            let kept = filter_problems_by_threshold(&ids, &set.pairs, threshold);
            assert_eq!(kept.len(), expected, "threshold {threshold}");
        }
    }

    #[test]
    fn expansion_is_deterministic() {
        let (_ids, a) = fixture();
        let (_ids2, b) = fixture();
        assert_eq!(a.pairs, b.pairs);
    }
}
