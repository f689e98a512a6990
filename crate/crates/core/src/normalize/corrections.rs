//! Manual-corrections overlay: targeted LaTeX replacements for fields the
//! automatic paths get wrong.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{latex_valid, NormalizeError};
use crate::kb::KnowledgeBase;
use crate::util;

/// One manual correction (`corrections.json` is a list of these).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CorrectionRecord {
    pub symbol_id: String,
    /// `"description"`, `"cmp_properties[i]"`, or `"examples[i]"`.
    pub field_path: String,
    pub replacement: String,
}

/// Parsed field path within a symbol entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPath {
    Description,
    Cmp(usize),
    Example(usize),
}

impl FieldPath {
    pub fn parse(s: &str) -> Option<FieldPath> {
        if s == "description" {
            return Some(FieldPath::Description);
        }
        for (prefix, ctor) in [
            ("cmp_properties[", FieldPath::Cmp as fn(usize) -> FieldPath),
            ("examples[", FieldPath::Example as fn(usize) -> FieldPath),
        ] {
            if let Some(rest) = s.strip_prefix(prefix) {
                if let Some(idx) = rest.strip_suffix(']') {
                    return idx.parse().ok().map(ctor);
                }
            }
        }
        None
    }

    pub fn render(self) -> String {
        match self {
            FieldPath::Description => "description".into(),
            FieldPath::Cmp(i) => format!("cmp_properties[{i}]"),
            FieldPath::Example(i) => format!("examples[{i}]"),
        }
    }
}

/// Loaded corrections, indexed by (symbol_id, field_path).
#[derive(Debug, Clone, Default)]
pub struct Corrections {
    map: BTreeMap<(String, String), String>,
}

impl Corrections {
    pub fn load(path: &Path) -> Result<Self, NormalizeError> {
        let records: Vec<CorrectionRecord> = util::read_json(path)?;
        Self::from_records(records)
    }

    pub fn from_records(records: Vec<CorrectionRecord>) -> Result<Self, NormalizeError> {
        let mut map = BTreeMap::new();
        for r in records {
            if FieldPath::parse(&r.field_path).is_none() {
                return Err(NormalizeError::BadCorrection {
                    symbol_id: r.symbol_id,
                    detail: format!("unparseable field_path `{}`", r.field_path),
                });
            }
            if !latex_valid(&r.replacement) {
                return Err(NormalizeError::BadCorrection {
                    symbol_id: r.symbol_id,
                    detail: format!("replacement is not valid LaTeX: `{}`", r.replacement),
                });
            }
            let key = (r.symbol_id.clone(), r.field_path.clone());
            if map.insert(key, r.replacement).is_some() {
                log::warn!(
                    "duplicate correction for {}/{}; last write wins",
                    r.symbol_id,
                    r.field_path
                );
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, symbol_id: &str, field_path: &str) -> Option<&str> {
        self.map
            .get(&(symbol_id.to_string(), field_path.to_string()))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &String)> {
        self.map.iter()
    }
}

/// Apply corrections directly to a knowledge base (targeted replacement).
/// Idempotent; errors on unresolvable targets.
pub fn apply_manual_corrections(
    kb: &KnowledgeBase,
    corrections: &Corrections,
) -> Result<KnowledgeBase, NormalizeError> {
    let mut out = kb.clone();
    for ((symbol_id, field_path), replacement) in corrections.iter() {
        let unresolved = || NormalizeError::UnresolvedCorrection {
            symbol_id: symbol_id.clone(),
            field_path: field_path.clone(),
        };
        let idx = out
            .symbols
            .binary_search_by(|e| e.symbol_id.as_str().cmp(symbol_id))
            .map_err(|_| unresolved())?;
        let entry = &mut out.symbols[idx];
        match FieldPath::parse(field_path).ok_or_else(unresolved)? {
            FieldPath::Description => entry.description = replacement.clone(),
            FieldPath::Cmp(i) => {
                *entry.cmps.get_mut(i).ok_or_else(unresolved)? = replacement.clone();
            }
            FieldPath::Example(i) => {
                *entry.examples.get_mut(i).ok_or_else(unresolved)? = replacement.clone();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{KbCounts, KnowledgeBase, SymbolEntry};

    fn kb_with_one() -> KnowledgeBase {
        KnowledgeBase {
            source_fingerprint: "fp".into(),
            counts: KbCounts {
                cds: 1,
                symbols: 1,
                filtered: 0,
                indexed: 1,
            },
            symbols: vec![SymbolEntry {
                symbol_id: "a:f".into(),
                cd: "a".into(),
                name: "f".into(),
                description: "garbled".into(),
                cmps: vec!["one".into(), "two".into()],
                examples: vec![],
                fmp_count: 0,
                signature: None,
            }],
        }
    }

    #[test]
    fn applies_and_is_idempotent() {
        let kb = kb_with_one();
        let corr = Corrections::from_records(vec![CorrectionRecord {
            symbol_id: "a:f".into(),
            field_path: "cmp_properties[1]".into(),
            replacement: "\\frac{1}{2}".into(),
        }])
        .unwrap();
        let once = apply_manual_corrections(&kb, &corr).unwrap();
        assert_eq!(once.symbols[0].cmps[1], "\\frac{1}{2}");
        let twice = apply_manual_corrections(&once, &corr).unwrap();
        assert_eq!(
            serde_json::to_string(&once).unwrap(),
            serde_json::to_string(&twice).unwrap()
        );
    }

    #[test]
    fn empty_corrections_is_identity() {
        let kb = kb_with_one();
        let out = apply_manual_corrections(&kb, &Corrections::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&kb).unwrap(),
            serde_json::to_string(&out).unwrap()
        );
    }

    #[test]
    fn unresolvable_target_is_an_error() {
        let kb = kb_with_one();
        let corr = Corrections::from_records(vec![CorrectionRecord {
            symbol_id: "a:f".into(),
            field_path: "cmp_properties[9]".into(),
            replacement: "x".into(),
        }])
        .unwrap();
        assert!(apply_manual_corrections(&kb, &corr).is_err());
    }

    #[test]
    fn invalid_replacement_rejected_at_load() {
        let err = Corrections::from_records(vec![CorrectionRecord {
            symbol_id: "a:f".into(),
            field_path: "description".into(),
            replacement: "\\frac{1}{".into(),
        }]);
        assert!(err.is_err());
    }

    #[test]
    fn duplicate_correction_last_write_wins() {
        let mk = |r: &str| CorrectionRecord {
            symbol_id: "a:f".into(),
            field_path: "description".into(),
            replacement: r.into(),
        };
        let corr = Corrections::from_records(vec![mk("first"), mk("second")]).unwrap();
        assert_eq!(corr.get("a:f", "description"), Some("second"));
        assert_eq!(corr.len(), 1);
    }
}
