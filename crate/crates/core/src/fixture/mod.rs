//! Deterministic generators for the bundled offline example assets.
//!
//! Everything in this module is a pure function of fixed seeds, so the
//! checked-in assets (dictionary corpus, benchmark problems, relevance
//! scores, answer pairs) can be regenerated bit-for-bit at any time via the
//! CLI's `gen-fixtures` command. Tests treat these generators as the frozen
//! reference data set; the constants in `released_table` pin the published
//! per-problem maximum relevance scores that the statistics tests check
//! against.

mod answers;
mod benchmark;
mod corpus;
mod released_table;
mod scores;

pub use answers::{answer_pairs, AnswerPair};
pub use benchmark::{benchmark_subset, generate_benchmark, write_benchmark_jsonl, SUBSET_SIZE};
pub use corpus::{
    corpus_corrections, corpus_filters, stopword_list, write_corpus, CorpusStats,
    UnconvertibleField,
};
pub use scores::{released_rows, released_scores, ReleasedRow, ReleasedScoreSet};
