//! Dense retrieval: embedding matrix storage (binary matrix + JSON sidecar)
//! and cosine-similarity ranking.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::util::{read_json, write_json, UtilError};

/// Row-major matrix of 32-bit-float embeddings, one row per id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    index: BTreeMap<String, usize>,
    cols: usize,
    data: Vec<f32>,
    pub model_tag: String,
}

/// JSON sidecar describing the binary matrix file.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    rows: usize,
    cols: usize,
    ids: Vec<String>,
    model_tag: String,
}

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("embedding dimension mismatch: expected {expected}, got {got} for {id}")]
    DimMismatch {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate embedding id {0}")]
    DuplicateId(String),
    #[error("matrix file {path} holds {actual} floats but sidecar declares {expected}")]
    ShapeMismatch {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Util(#[from] UtilError),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl EmbeddingMatrix {
    pub fn new(model_tag: &str) -> EmbeddingMatrix {
        EmbeddingMatrix {
            ids: Vec::new(),
            index: BTreeMap::new(),
            cols: 0,
            data: Vec::new(),
            model_tag: model_tag.to_string(),
        }
    }

    pub fn rows(&self) -> usize {
        self.ids.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn push_row(&mut self, id: &str, row: &[f32]) -> Result<(), EmbedError> {
        if self.index.contains_key(id) {
            return Err(EmbedError::DuplicateId(id.to_string()));
        }
        if self.ids.is_empty() {
            self.cols = row.len();
        } else if row.len() != self.cols {
            return Err(EmbedError::DimMismatch {
                id: id.to_string(),
                expected: self.cols,
                got: row.len(),
            });
        }
        self.index.insert(id.to_string(), self.ids.len());
        self.ids.push(id.to_string());
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_for(&self, id: &str) -> Option<&[f32]> {
        self.index.get(id).map(|&i| self.row(i))
    }

    fn sidecar_path(bin_path: &Path) -> PathBuf {
        bin_path.with_extension("json")
    }

    /// Write the matrix as little-endian f32 bytes plus a JSON sidecar
    /// (`<name>.json` next to `<name>.bin`).
    pub fn save(&self, bin_path: &Path) -> Result<(), EmbedError> {
        let mut bytes = Vec::with_capacity(self.data.len() * 4);
        for v in &self.data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let tmp = bin_path.with_extension("bin.tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(|e| EmbedError::Io {
                path: tmp.clone(),
                source: e,
            })?;
            f.write_all(&bytes).map_err(|e| EmbedError::Io {
                path: tmp.clone(),
                source: e,
            })?;
        }
        fs::rename(&tmp, bin_path).map_err(|e| EmbedError::Io {
            path: bin_path.to_path_buf(),
            source: e,
        })?;
        let sidecar = Sidecar {
            rows: self.rows(),
            cols: self.cols,
            ids: self.ids.clone(),
            model_tag: self.model_tag.clone(),
        };
        write_json(&Self::sidecar_path(bin_path), &sidecar)?;
        Ok(())
    }

    pub fn load(bin_path: &Path) -> Result<EmbeddingMatrix, EmbedError> {
        let sidecar: Sidecar = read_json(&Self::sidecar_path(bin_path))?;
        let bytes = fs::read(bin_path).map_err(|e| EmbedError::Io {
            path: bin_path.to_path_buf(),
            source: e,
        })?;
        let expected = sidecar.rows * sidecar.cols;
        if bytes.len() != expected * 4 {
            return Err(EmbedError::ShapeMismatch {
                path: bin_path.to_path_buf(),
                expected,
                actual: bytes.len() / 4,
            });
        }
        let data: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let index = sidecar
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Ok(EmbeddingMatrix {
            ids: sidecar.ids,
            index,
            cols: sidecar.cols,
            data,
            model_tag: sidecar.model_tag,
        })
    }
}

/// Cosine similarity; zero-norm input on either side yields 0.
pub fn cosine<F: Real>(a: &[F], b: &[F]) -> F {
    let mut dot = F::zero();
    let mut na = F::zero();
    let mut nb = F::zero();
    for (&x, &y) in a.iter().zip(b.iter()) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == F::zero() || nb == F::zero() {
        return F::zero();
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Cosine over f32 slices accumulated in f64 (the ranking path).
fn cosine_wide(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for (&x, &y) in a.iter().zip(b.iter()) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Rank every row of the matrix by cosine similarity to the query,
/// descending, ties broken by id. Zero-norm pairs score 0 with a warning.
pub fn dense_rank(query: &[f32], matrix: &EmbeddingMatrix) -> Vec<(String, f64)> {
    let query_zero = query.iter().all(|&v| v == 0.0);
    if query_zero && matrix.rows() > 0 {
        log::warn!("dense ranking against a zero-norm query; all similarities are 0");
    }
    let mut out: Vec<(String, f64)> = (0..matrix.rows())
        .map(|i| {
            let row = matrix.row(i);
            let sim = cosine_wide(query, row);
            if !query_zero && row.iter().all(|&v| v == 0.0) {
                log::warn!(
                    "zero-norm embedding row for {}; similarity set to 0",
                    matrix.ids()[i]
                );
            }
            (matrix.ids()[i].clone(), sim)
        })
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
