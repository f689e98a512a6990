//! Shared plumbing: content fingerprints, JSONL I/O and bounded parallel
//! execution.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Errors raised by the utility helpers.
#[derive(Debug, thiserror::Error)]
pub enum UtilError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid json: {source}")]
    JsonLine {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("json error on {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid content in {path}: {message}")]
    Invalid { path: String, message: String },
}

fn io_err(path: &Path, source: std::io::Error) -> UtilError {
    UtilError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Hex-encoded SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Fingerprint of a single file's contents.
pub fn fingerprint_file(path: &Path) -> Result<String, UtilError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Sanitize a free-form tag for use as a file-name component: anything that
/// is not alphanumeric, `-`, or `.` becomes `-`.
pub fn sanitize_component(tag: &str) -> String {
    tag.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Deterministic fingerprint of a directory tree: SHA-256 over the sorted
/// sequence of (relative path, file bytes) pairs. Hidden files are included;
/// directories only contribute through their files.
pub fn fingerprint_dir(root: &Path) -> Result<String, UtilError> {
    let mut files: Vec<std::path::PathBuf> = walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file())
        .map(|e| e.into_path())
        .collect();
    files.sort();
    let mut h = Sha256::new();
    for f in &files {
        let rel = f.strip_prefix(root).unwrap_or(f);
        h.update(rel.to_string_lossy().as_bytes());
        h.update([0u8]);
        let bytes = std::fs::read(f).map_err(|e| io_err(f, e))?;
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex(&h.finalize()))
}

/// Fingerprint of several already-computed digests plus free-form salt
/// strings (used for pipeline stage inputs).
pub fn combine_fingerprints(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0x1f]);
    }
    hex(&h.finalize())
}

/// Read a JSON file into a value.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, UtilError> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| UtilError::Json {
        path: path.display().to_string(),
        source: e,
    })
}

/// Write a value as pretty-printed JSON (atomically via a temp file in the
/// same directory, so partially written artifacts are never observed).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), UtilError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    {
        let f = File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| UtilError::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        w.write_all(b"\n").map_err(|e| io_err(&tmp, e))?;
        w.flush().map_err(|e| io_err(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Read a JSONL file, reporting the 1-based line number on parse failure.
/// Blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, UtilError> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line).map_err(|e| UtilError::JsonLine {
            path: path.display().to_string(),
            line: i + 1,
            source: e,
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Write records as JSONL, replacing any existing file.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), UtilError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| UtilError::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Append-only JSONL writer that flushes after every record, so completed
/// records survive an aborted run.
pub struct JsonlAppender {
    path: std::path::PathBuf,
    w: BufWriter<File>,
}

impl JsonlAppender {
    /// Open for appending (creates the file and parent dirs when missing).
    pub fn open(path: &Path) -> Result<Self, UtilError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let f = File::options()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            w: BufWriter::new(f),
        })
    }

    /// Append one record and flush it to disk.
    pub fn append<T: Serialize>(&mut self, record: &T) -> Result<(), UtilError> {
        serde_json::to_writer(&mut self.w, record).map_err(|e| UtilError::Json {
            path: self.path.display().to_string(),
            source: e,
        })?;
        self.w.write_all(b"\n").map_err(|e| io_err(&self.path, e))?;
        self.w.flush().map_err(|e| io_err(&self.path, e))?;
        Ok(())
    }
}

/// Run `f` over `items` with at most `max_inflight` parallel workers,
/// preserving input order in the output. `max_inflight == 1` runs inline,
/// which keeps call ordering deterministic for scripted services.
pub fn bounded_parallel_map<T, R, F>(items: Vec<T>, max_inflight: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    if max_inflight <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_inflight)
        .build()
        .expect("thread pool");
    pool.install(|| {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprints_are_stable_and_content_sensitive() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), b"alpha").unwrap();
        std::fs::create_dir(dir.path().join("sub")).unwrap();
        std::fs::write(dir.path().join("sub/b.txt"), b"beta").unwrap();
        let fp1 = fingerprint_dir(dir.path()).unwrap();
        let fp2 = fingerprint_dir(dir.path()).unwrap();
        assert_eq!(fp1, fp2);
        std::fs::write(dir.path().join("sub/b.txt"), b"beta2").unwrap();
        assert_ne!(fp1, fingerprint_dir(dir.path()).unwrap());
    }

    #[test]
    fn jsonl_roundtrip_and_line_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        write_jsonl(
            &p,
            &[serde_json::json!({"a": 1}), serde_json::json!({"a": 2})],
        )
        .unwrap();
        let back: Vec<serde_json::Value> = read_jsonl(&p).unwrap();
        assert_eq!(back.len(), 2);

        std::fs::write(&p, "{\"a\":1}\nnot json\n").unwrap();
        let err = read_jsonl::<serde_json::Value>(&p).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn appender_persists_each_record() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.jsonl");
        {
            let mut a = JsonlAppender::open(&p).unwrap();
            a.append(&serde_json::json!({"id": 1})).unwrap();
            // drop without closing cleanly; the flush already happened
        }
        {
            let mut a = JsonlAppender::open(&p).unwrap();
            a.append(&serde_json::json!({"id": 2})).unwrap();
        }
        let back: Vec<serde_json::Value> = read_jsonl(&p).unwrap();
        assert_eq!(back.len(), 2);
    }

    #[test]
    fn bounded_map_preserves_order() {
        let xs: Vec<u32> = (0..100).collect();
        let ys = bounded_parallel_map(xs.clone(), 4, |x| x * 2);
        assert_eq!(ys, xs.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
