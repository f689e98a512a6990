//! Weighted Reciprocal Rank Fusion.

use crate::scalar::Real;

/// Fuse ranked id lists: each document scores Σ_r w_r / (k + rank_r), where
/// rank_r is its 1-based position in list r and absent lists contribute
/// nothing. Output is descending by fused score with ties broken by id.
///
/// Panics if `weights` and `lists` differ in length (programmer error).
pub fn rrf_fuse<F: Real>(lists: &[Vec<String>], weights: &[F], k: F) -> Vec<(String, F)> {
    assert_eq!(lists.len(), weights.len(), "one weight per ranked list");
    let mut scores: std::collections::BTreeMap<&str, F> = std::collections::BTreeMap::new();
    for (list, &w) in lists.iter().zip(weights.iter()) {
        for (idx, id) in list.iter().enumerate() {
            let rank = F::from_f64_lossy((idx + 1) as f64);
            let contribution = w / (k + rank);
            scores
                .entry(id.as_str())
                .and_modify(|s| *s += contribution)
                .or_insert(contribution);
        }
    }
    let mut out: Vec<(String, F)> = scores
        .into_iter()
        .map(|(id, s)| (id.to_string(), s))
        .collect();
    out.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.cmp(&b.0))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_list_preserves_order() {
        let fused = rrf_fuse::<f64>(&[ids(&["a", "b", "c"])], &[1.0], 60.0);
        let order: Vec<&str> = fused.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(order, ["a", "b", "c"]);
    }

    #[test]
    fn rank_one_in_both_lists_scores_one_sixty_first() {
        let fused = rrf_fuse::<f64>(&[ids(&["a", "b"]), ids(&["a", "c"])], &[0.5, 0.5], 60.0);
        assert_eq!(fused[0].0, "a");
        assert!((fused[0].1 - 1.0 / 61.0).abs() < 1e-15);
        assert!((fused[0].1 - 0.016393).abs() < 5e-7);
    }

    #[test]
    fn absent_documents_contribute_nothing() {
        let fused = rrf_fuse::<f64>(&[ids(&["a"]), ids(&["b"])], &[0.5, 0.5], 60.0);
        // both rank 1 in one list only → equal scores, tie broken by id
        assert_eq!(fused[0].0, "a");
        assert_eq!(fused[1].0, "b");
        assert!((fused[0].1 - fused[1].1).abs() < 1e-15);
        assert!((fused[0].1 - 0.5 / 61.0).abs() < 1e-15);
    }

    #[test]
    fn improving_a_rank_never_decreases_score() {
        let base = rrf_fuse::<f64>(
            &[ids(&["a", "b", "c"]), ids(&["c", "b", "a"])],
            &[0.5, 0.5],
            60.0,
        );
        let improved = rrf_fuse::<f64>(
            &[ids(&["b", "a", "c"]), ids(&["c", "b", "a"])],
            &[0.5, 0.5],
            60.0,
        );
        let score = |fused: &[(String, f64)], id: &str| {
            fused
                .iter()
                .find(|(i, _)| i == id)
                .map(|(_, s)| *s)
                .unwrap()
        };
        assert!(score(&improved, "b") > score(&base, "b"));
    }

    #[test]
    fn works_in_f32() {
        let fused = rrf_fuse::<f32>(&[ids(&["a", "b"]), ids(&["a", "c"])], &[0.5, 0.5], 60.0);
        assert_eq!(fused[0].0, "a");
        assert!((fused[0].1 - 1.0f32 / 61.0).abs() < 1e-6);
    }
}
