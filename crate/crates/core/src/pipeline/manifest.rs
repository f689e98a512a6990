//! Run manifest: per-stage input fingerprints and output listings, stored
//! in the output directory so an interrupted or re-invoked run can skip
//! stages whose inputs have not changed.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::util::{self, UtilError};

/// Manifest file name inside the output directory.
pub const MANIFEST_FILE: &str = "manifest.json";

/// One completed stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Combined fingerprint of the stage's inputs and parameters.
    pub fingerprint: String,
    /// Completion time, seconds since the Unix epoch.
    pub completed_unix: u64,
    /// Output paths relative to the output directory.
    pub outputs: Vec<String>,
}

/// All completed stages of one output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Short identifier derived from the config that created the manifest.
    pub run_id: String,
    /// Creation time, seconds since the Unix epoch.
    pub created_unix: u64,
    /// Model tags of the configured endpoints, for provenance.
    pub endpoint_tags: BTreeMap<String, String>,
    /// Stage name -> completion record.
    pub stages: BTreeMap<String, StageRecord>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(run_id: &str, endpoint_tags: BTreeMap<String, String>) -> RunManifest {
        RunManifest {
            run_id: run_id.to_string(),
            created_unix: unix_now(),
            endpoint_tags,
            stages: BTreeMap::new(),
        }
    }

    /// Load the manifest from `out_dir`, or start a fresh one when the file
    /// is absent or unreadable (a corrupt manifest only costs recomputation).
    pub fn load_or_new(
        out_dir: &Path,
        run_id: &str,
        endpoint_tags: BTreeMap<String, String>,
    ) -> RunManifest {
        let path = out_dir.join(MANIFEST_FILE);
        if path.exists() {
            match util::read_json::<RunManifest>(&path) {
                Ok(mut m) => {
                    // Keep completed stages; refresh identity fields.
                    m.run_id = run_id.to_string();
                    m.endpoint_tags = endpoint_tags;
                    return m;
                }
                Err(err) => {
                    log::warn!("ignoring unreadable manifest {}: {err}", path.display());
                }
            }
        }
        RunManifest::new(run_id, endpoint_tags)
    }

    /// Whether `stage` completed with this exact fingerprint and all of its
    /// recorded outputs still exist under `out_dir`.
    pub fn is_current(&self, stage: &str, fingerprint: &str, out_dir: &Path) -> bool {
        match self.stages.get(stage) {
            Some(rec) if rec.fingerprint == fingerprint => {
                rec.outputs.iter().all(|rel| out_dir.join(rel).exists())
            }
            _ => false,
        }
    }

    /// Record a completed stage.
    pub fn record(&mut self, stage: &str, fingerprint: &str, outputs: Vec<String>) {
        self.stages.insert(
            stage.to_string(),
            StageRecord {
                fingerprint: fingerprint.to_string(),
                completed_unix: unix_now(),
                outputs,
            },
        );
    }

    /// Drop a stage record (used when a stage is about to be re-run, so a
    /// crash mid-stage cannot leave a stale "completed" entry behind).
    pub fn invalidate(&mut self, stage: &str) {
        self.stages.remove(stage);
    }

    pub fn save(&self, out_dir: &Path) -> Result<(), UtilError> {
        util::write_json(&out_dir.join(MANIFEST_FILE), self)
    }
}
