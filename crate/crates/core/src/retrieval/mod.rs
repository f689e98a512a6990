//! Hybrid retrieval: lexical BM25 and dense cosine ranking fused by
//! weighted Reciprocal Rank Fusion, keeping the top candidates per problem.

mod bm25;
mod embed;
mod rrf;
mod tokenize;

pub use bm25::{Bm25Index, Bm25Params};
pub use embed::{cosine, dense_rank, EmbedError, EmbeddingMatrix};
pub use rrf::rrf_fuse;
pub use tokenize::{load_stopwords, tokenize, MIN_STOPWORDS};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// One fused retrieval hit for a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub problem_id: String,
    pub symbol_id: String,
    /// 1-based rank in the BM25 list; `None` when the symbol shares no term
    /// with the query (BM25 omits zero-score documents).
    pub bm25_rank: Option<usize>,
    /// 1-based rank in the dense list (always present: every row is scored).
    pub dense_rank: Option<usize>,
    pub rrf_score: f64,
    pub rrf_rank: usize,
}

/// Fusion and cut-off parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub top_n: usize,
    pub rrf_k: f64,
    pub weight_bm25: f64,
    pub weight_dense: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            top_n: 50,
            rrf_k: 60.0,
            weight_bm25: 0.5,
            weight_dense: 0.5,
        }
    }
}

/// Run both retrievers for one problem and fuse the results, keeping the
/// `top_n` candidates by RRF score.
pub fn retrieve_top(
    problem_id: &str,
    query_tokens: &[String],
    query_embedding: &[f32],
    index: &Bm25Index,
    matrix: &EmbeddingMatrix,
    config: &RetrievalConfig,
) -> Vec<RankedCandidate> {
    let lexical = index.rank(query_tokens);
    let dense = dense_rank(query_embedding, matrix);
    let lexical_ids: Vec<String> = lexical.iter().map(|(id, _)| id.clone()).collect();
    let dense_ids: Vec<String> = dense.iter().map(|(id, _)| id.clone()).collect();
    let fused = rrf_fuse(
        &[lexical_ids.clone(), dense_ids.clone()],
        &[config.weight_bm25, config.weight_dense],
        config.rrf_k,
    );
    let lexical_rank: HashMap<&str, usize> = lexical_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i + 1))
        .collect();
    let dense_rank_of: HashMap<&str, usize> = dense_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i + 1))
        .collect();
    fused
        .into_iter()
        .take(config.top_n)
        .enumerate()
        .map(|(i, (symbol_id, rrf_score))| RankedCandidate {
            problem_id: problem_id.to_string(),
            bm25_rank: lexical_rank.get(symbol_id.as_str()).copied(),
            dense_rank: dense_rank_of.get(symbol_id.as_str()).copied(),
            symbol_id,
            rrf_score,
            rrf_rank: i + 1,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Bm25Index, EmbeddingMatrix) {
        let docs = vec![
            (
                "sym/a".to_string(),
                vec!["gcd".to_string(), "divisor".to_string()],
            ),
            (
                "sym/b".to_string(),
                vec!["prime".to_string(), "integer".to_string()],
            ),
            (
                "sym/c".to_string(),
                vec!["matrix".to_string(), "determinant".to_string()],
            ),
            (
                "sym/d".to_string(),
                vec!["polynomial".to_string(), "root".to_string()],
            ),
        ];
        let index = Bm25Index::build(&docs, Bm25Params::default());
        let mut matrix = EmbeddingMatrix::new("test");
        matrix.push_row("sym/a", &[1.0, 0.0, 0.0, 0.0]).unwrap();
        matrix.push_row("sym/b", &[0.0, 1.0, 0.0, 0.0]).unwrap();
        matrix.push_row("sym/c", &[0.0, 0.0, 1.0, 0.0]).unwrap();
        matrix.push_row("sym/d", &[0.0, 0.0, 0.0, 1.0]).unwrap();
        (index, matrix)
    }

    #[test]
    fn short_corpus_returns_all_matches_without_padding() {
        let (index, matrix) = fixture();
        let out = retrieve_top(
            "p1",
            &["gcd".to_string()],
            &[1.0, 0.0, 0.0, 0.0],
            &index,
            &matrix,
            &RetrievalConfig::default(),
        );
        // dense scores every row, so all four symbols appear; no padding beyond
        assert_eq!(out.len(), 4);
        assert_eq!(out[0].symbol_id, "sym/a");
        assert_eq!(out[0].bm25_rank, Some(1));
        assert_eq!(out[0].dense_rank, Some(1));
        assert_eq!(out[0].rrf_rank, 1);
        assert!((out[0].rrf_score - 1.0 / 61.0).abs() < 1e-15);
        // symbols absent from the BM25 list have no lexical rank
        assert!(out.iter().skip(1).all(|c| c.bm25_rank.is_none()));
    }

    #[test]
    fn disjoint_lists_interleave_by_fused_score() {
        let (index, matrix) = fixture();
        // lexical hits sym/b ("prime"); dense points at sym/c
        let out = retrieve_top(
            "p2",
            &["prime".to_string()],
            &[0.0, 0.0, 1.0, 0.0],
            &index,
            &matrix,
            &RetrievalConfig::default(),
        );
        // brute-force fused scores
        let lexical = index.rank(&["prime".to_string()]);
        assert_eq!(lexical.len(), 1);
        let dense_order = ["sym/c", "sym/a", "sym/b", "sym/d"]; // cosine 1 then ties by id
        let mut expect: Vec<(String, f64)> = Vec::new();
        for id in ["sym/a", "sym/b", "sym/c", "sym/d"] {
            let mut s = 0.0;
            if id == "sym/b" {
                s += 0.5 / 61.0;
            }
            let dr = dense_order.iter().position(|d| *d == id).unwrap() + 1;
            s += 0.5 / (60.0 + dr as f64);
            expect.push((id.to_string(), s));
        }
        expect.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        for (got, want) in out.iter().zip(expect.iter()) {
            assert_eq!(got.symbol_id, want.0);
            assert!((got.rrf_score - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn top_n_truncates() {
        let (index, matrix) = fixture();
        let cfg = RetrievalConfig {
            top_n: 2,
            ..RetrievalConfig::default()
        };
        let out = retrieve_top(
            "p3",
            &["gcd".to_string()],
            &[1.0, 0.0, 0.0, 0.0],
            &index,
            &matrix,
            &cfg,
        );
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].rrf_rank, 2);
    }
}
