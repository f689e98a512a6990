//! Core library for an ontology-guided retrieval-augmented generation
//! pipeline over a symbol knowledge base.
//!
//! The pipeline has five stages plus evaluation:
//!
//! 1. [`kb`] — parse OpenMath content dictionaries into a symbol knowledge
//!    base with descriptions, formal properties and type signatures.
//! 2. [`normalize`] — convert symbolic notation into LaTeX via a
//!    deterministic pattern grammar with a model fallback and manual
//!    corrections.
//! 3. [`concepts`] — extract key mathematical concepts from problem
//!    statements through a structured generation call.
//! 4. [`retrieval`] — hybrid lexical (BM25) plus dense (cosine) retrieval
//!    fused with weighted reciprocal-rank fusion.
//! 5. [`rerank`] — cross-encoder relevance scoring, adaptive symbol
//!    selection and score-threshold problem filtering.
//!
//! [`inference`] runs prompt-augmented generation with online answer
//! verification, [`verify`] implements answer equivalence (string
//! canonicalization plus a numeric sampling oracle), and [`metrics`]
//! aggregates runs into reports. [`gateway`] abstracts the model services
//! (generation / embedding / scoring) behind synchronous traits with HTTP
//! and scripted-mock implementations, so the whole pipeline can run fully
//! offline and deterministically.

pub mod bench;
pub mod concepts;
pub mod fixture;
pub mod gateway;
pub mod inference;
pub mod kb;
pub mod metrics;
pub mod mocks;
pub mod normalize;
pub mod pipeline;
pub mod rerank;
pub mod retrieval;
pub mod scalar;
pub mod util;
pub mod verify;

/// Scalar type used for retrieval, fusion and reranker scores.
pub type Score = f64;
/// Scalar type used for stored embedding vectors (matches the on-disk format).
pub type EmbedScalar = f32;
