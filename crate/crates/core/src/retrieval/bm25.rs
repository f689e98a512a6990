//! Okapi BM25 index over description cards.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// BM25 free parameters (standard Okapi defaults).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.5, b: 0.75 }
    }
}

/// Inverted index with document lengths for BM25 scoring.
#[derive(Debug, Clone)]
pub struct Bm25Index {
    params: Bm25Params,
    doc_ids: Vec<String>,
    doc_lens: Vec<usize>,
    avgdl: f64,
    postings: BTreeMap<String, Vec<(usize, u32)>>, // term -> (doc index, tf)
}

impl Bm25Index {
    /// Build an index from `(document_id, tokens)` pairs. Documents are
    /// indexed in the given order; ids are expected to be unique.
    pub fn build(docs: &[(String, Vec<String>)], params: Bm25Params) -> Bm25Index {
        let mut postings: BTreeMap<String, Vec<(usize, u32)>> = BTreeMap::new();
        let mut doc_ids = Vec::with_capacity(docs.len());
        let mut doc_lens = Vec::with_capacity(docs.len());
        for (i, (id, tokens)) in docs.iter().enumerate() {
            doc_ids.push(id.clone());
            doc_lens.push(tokens.len());
            let mut tf: BTreeMap<&str, u32> = BTreeMap::new();
            for t in tokens {
                *tf.entry(t.as_str()).or_default() += 1;
            }
            for (term, count) in tf {
                postings
                    .entry(term.to_string())
                    .or_default()
                    .push((i, count));
            }
        }
        let total: usize = doc_lens.iter().sum();
        let avgdl = if doc_lens.is_empty() {
            0.0
        } else {
            total as f64 / doc_lens.len() as f64
        };
        Bm25Index {
            params,
            doc_ids,
            doc_lens,
            avgdl,
            postings,
        }
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    /// Inverse document frequency: ln(1 + (N - df + 0.5) / (df + 0.5)).
    /// Always positive, so every matching document scores above zero.
    fn idf(&self, df: usize) -> f64 {
        let n = self.doc_ids.len() as f64;
        let df = df as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Score documents against a query and return matches in descending
    /// score order (ties broken by document id). Documents sharing no term
    /// with the query are omitted. Repeated query tokens are deduplicated:
    /// each distinct term contributes once.
    pub fn rank(&self, query_tokens: &[String]) -> Vec<(String, f64)> {
        let mut seen: Vec<&str> = Vec::new();
        let mut scores: BTreeMap<usize, f64> = BTreeMap::new();
        for t in query_tokens {
            if seen.contains(&t.as_str()) {
                continue;
            }
            seen.push(t.as_str());
            let Some(plist) = self.postings.get(t.as_str()) else {
                continue;
            };
            let idf = self.idf(plist.len());
            for &(doc, tf) in plist {
                let tf = tf as f64;
                let dl = self.doc_lens[doc] as f64;
                let norm = if self.avgdl > 0.0 {
                    dl / self.avgdl
                } else {
                    0.0
                };
                let denom = tf + self.params.k1 * (1.0 - self.params.b + self.params.b * norm);
                *scores.entry(doc).or_default() += idf * tf * (self.params.k1 + 1.0) / denom;
            }
        }
        let mut out: Vec<(String, f64)> = scores
            .into_iter()
            .map(|(doc, s)| (self.doc_ids[doc].clone(), s))
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(spec: &[(&str, &str)]) -> Vec<(String, Vec<String>)> {
        spec.iter()
            .map(|(id, text)| {
                (
                    id.to_string(),
                    text.split_whitespace().map(str::to_string).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn zero_overlap_query_is_empty() {
        let idx = Bm25Index::build(
            &docs(&[("a", "integer factor"), ("b", "prime number")]),
            Bm25Params::default(),
        );
        assert!(idx.rank(&["polynomial".into()]).is_empty());
        assert!(idx.rank(&[]).is_empty());
    }

    #[test]
    fn single_match_ranks_first() {
        let idx = Bm25Index::build(
            &docs(&[
                ("a", "gcd divisor integer"),
                ("b", "prime number integer"),
                ("c", "matrix determinant"),
            ]),
            Bm25Params::default(),
        );
        let ranked = idx.rank(&["gcd".into()]);
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].0, "a");
        assert!(ranked[0].1 > 0.0);
    }

    #[test]
    fn scores_match_straight_line_formula() {
        // Three docs, lengths 3/2/4; query "x" hits doc0 (tf 2) and doc2 (tf 1).
        let idx = Bm25Index::build(
            &docs(&[("d0", "x x y"), ("d1", "y z"), ("d2", "x w w w")]),
            Bm25Params::default(),
        );
        let ranked = idx.rank(&["x".into()]);
        let (k1, b) = (1.5, 0.75);
        let n = 3.0f64;
        let df = 2.0f64;
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        let avgdl = (3.0 + 2.0 + 4.0) / 3.0;
        let score =
            |tf: f64, dl: f64| idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        let expect0 = score(2.0, 3.0);
        let expect2 = score(1.0, 4.0);
        assert!(expect0 > expect2);
        assert_eq!(ranked[0].0, "d0");
        assert_eq!(ranked[1].0, "d2");
        assert!((ranked[0].1 - expect0).abs() < 1e-12);
        assert!((ranked[1].1 - expect2).abs() < 1e-12);
    }

    #[test]
    fn ties_break_on_document_id() {
        // identical docs → identical scores
        let idx = Bm25Index::build(&docs(&[("z", "gcd"), ("a", "gcd")]), Bm25Params::default());
        let ranked = idx.rank(&["gcd".into()]);
        assert_eq!(ranked[0].0, "a");
        assert_eq!(ranked[1].0, "z");
        assert_eq!(ranked[0].1, ranked[1].1);
    }

    #[test]
    fn repeated_query_terms_count_once() {
        let idx = Bm25Index::build(&docs(&[("a", "gcd x")]), Bm25Params::default());
        let once = idx.rank(&["gcd".into()]);
        let twice = idx.rank(&["gcd".into(), "gcd".into()]);
        assert_eq!(once, twice);
    }
}
