//! Filter list for excluding meta/protocol dictionaries and individual
//! symbols from the index.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::KbError;
use crate::util;

/// Filter specification (`filters.json`): whole dictionaries by name plus
/// individual symbols by `"cd:name"` id.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FilterList {
    #[serde(default)]
    pub cds: Vec<String>,
    #[serde(default)]
    pub symbols: Vec<String>,
}

impl FilterList {
    pub fn load(path: &Path) -> Result<Self, KbError> {
        Ok(util::read_json(path)?)
    }

    /// Whether a symbol is excluded from the index.
    pub fn is_filtered(&self, cd: &str, symbol_id: &str) -> bool {
        self.cds.iter().any(|c| c == cd) || self.symbols.iter().any(|s| s == symbol_id)
    }
}
