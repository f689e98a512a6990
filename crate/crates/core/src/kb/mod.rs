//! Symbol knowledge base built from OpenMath content dictionaries.
//!
//! A corpus directory holds `.ocd` dictionary files (symbol definitions
//! with prose descriptions, commented mathematical properties and usage
//! examples) and `.sts` small-type-system files (type signatures). Building
//! the KB parses everything, attaches signatures, drops symbols matched by
//! the filter list (meta/protocol dictionaries and individually excluded
//! ids) and produces a deterministic, id-sorted symbol table.

mod card;
mod cd_parser;
mod filter;
mod sts;

pub use card::description_card;
pub use cd_parser::{parse_cd_file, CdFile, RawSymbol};
pub use filter::FilterList;
pub use sts::parse_sts_file;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::util;

/// Errors raised while building or loading the knowledge base.
#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("{path}: malformed dictionary: {detail}")]
    MalformedCd { path: String, detail: String },
    #[error(transparent)]
    Util(#[from] util::UtilError),
    #[error("corpus directory {0} contains no .ocd files")]
    EmptyCorpus(String),
}

/// One indexed symbol.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SymbolEntry {
    /// Stable id of the form `"<cd>:<name>"`, e.g. `"arith1:gcd"`.
    pub symbol_id: String,
    pub cd: String,
    pub name: String,
    /// Prose description (whitespace-collapsed).
    pub description: String,
    /// Commented mathematical properties (CMP elements).
    #[serde(default)]
    pub cmps: Vec<String>,
    /// Usage examples (text content only).
    #[serde(default)]
    pub examples: Vec<String>,
    /// Number of formal mathematical properties (FMP elements) present.
    #[serde(default)]
    pub fmp_count: usize,
    /// Rendered type signature, e.g. `"nassoc(SemiGroup) -> SemiGroup"`.
    #[serde(default)]
    pub signature: Option<String>,
}

/// Corpus-level counters reported in the KB header.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct KbCounts {
    /// Number of dictionary files parsed.
    pub cds: usize,
    /// Total symbol definitions found.
    pub symbols: usize,
    /// Symbols dropped by the filter list.
    pub filtered: usize,
    /// Symbols retained for indexing (`symbols - filtered`).
    pub indexed: usize,
}

/// The knowledge base artifact (`kb.json` / `kb.normalized.json`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KnowledgeBase {
    /// Fingerprint of the source corpus directory.
    pub source_fingerprint: String,
    pub counts: KbCounts,
    /// Indexed symbols, sorted by `symbol_id`.
    pub symbols: Vec<SymbolEntry>,
}

impl KnowledgeBase {
    /// Look up a symbol by id (entries are sorted, so binary search).
    pub fn get(&self, symbol_id: &str) -> Option<&SymbolEntry> {
        self.symbols
            .binary_search_by(|e| e.symbol_id.as_str().cmp(symbol_id))
            .ok()
            .map(|i| &self.symbols[i])
    }

    pub fn load(path: &Path) -> Result<Self, KbError> {
        Ok(util::read_json(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), KbError> {
        Ok(util::write_json(path, self)?)
    }
}

/// Build the knowledge base from a corpus directory.
///
/// Walks `cds_dir` for `.ocd` and `.sts` files (sorted, so output order is
/// independent of filesystem iteration order), parses them, applies the
/// filter list and attaches signatures. Duplicate symbol names within one
/// dictionary keep the first definition and log a warning.
pub fn build_kb(cds_dir: &Path, filters: &FilterList) -> Result<KnowledgeBase, KbError> {
    let mut ocd_files = Vec::new();
    let mut sts_files = Vec::new();
    for entry in walkdir::WalkDir::new(cds_dir).sort_by_file_name() {
        let entry = entry.map_err(|e| KbError::MalformedCd {
            path: cds_dir.display().to_string(),
            detail: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        match entry.path().extension().and_then(|e| e.to_str()) {
            Some("ocd") => ocd_files.push(entry.into_path()),
            Some("sts") => sts_files.push(entry.into_path()),
            _ => {}
        }
    }
    ocd_files.sort();
    sts_files.sort();
    if ocd_files.is_empty() {
        return Err(KbError::EmptyCorpus(cds_dir.display().to_string()));
    }

    let mut signatures: BTreeMap<(String, String), String> = BTreeMap::new();
    for p in &sts_files {
        for (cd, name, sig) in parse_sts_file(p)? {
            signatures.insert((cd, name), sig);
        }
    }

    let mut symbols_total = 0usize;
    let mut filtered = 0usize;
    let mut entries: Vec<SymbolEntry> = Vec::new();
    for p in &ocd_files {
        let cd = parse_cd_file(p)?;
        let mut seen = std::collections::BTreeSet::new();
        for raw in cd.symbols {
            if !seen.insert(raw.name.clone()) {
                log::warn!("{}: duplicate symbol {} ignored", p.display(), raw.name);
                continue;
            }
            symbols_total += 1;
            let symbol_id = format!("{}:{}", cd.name, raw.name);
            if filters.is_filtered(&cd.name, &symbol_id) {
                filtered += 1;
                continue;
            }
            if raw.description.is_empty() {
                log::warn!("{symbol_id}: empty description");
            }
            let signature = signatures
                .get(&(cd.name.clone(), raw.name.clone()))
                .cloned();
            entries.push(SymbolEntry {
                symbol_id,
                cd: cd.name.clone(),
                name: raw.name,
                description: raw.description,
                cmps: raw.cmps,
                examples: raw.examples,
                fmp_count: raw.fmp_count,
                signature,
            });
        }
    }
    entries.sort_by(|a, b| a.symbol_id.cmp(&b.symbol_id));

    Ok(KnowledgeBase {
        source_fingerprint: util::fingerprint_dir(cds_dir)?,
        counts: KbCounts {
            cds: ocd_files.len(),
            symbols: symbols_total,
            filtered,
            indexed: entries.len(),
        },
        symbols: entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_corpus(dir: &Path) {
        std::fs::write(
            dir.join("arith1.ocd"),
            r#"<CD xmlns="http://www.openmath.org/OpenMathCD">
  <CDName>arith1</CDName>
  <CDDefinition>
    <Name>gcd</Name>
    <Description>
      Greatest common divisor of two or more integers
    </Description>
    <CMP>gcd(a,b) * lcm(a,b) = a * b</CMP>
    <FMP><OMOBJ/></FMP>
    <Example>gcd(6,9) = 3</Example>
  </CDDefinition>
  <CDDefinition>
    <Name>plus</Name>
    <Description>Addition of two or more numbers</Description>
  </CDDefinition>
</CD>"#,
        )
        .unwrap();
        std::fs::write(
            dir.join("meta.ocd"),
            r#"<CD xmlns="http://www.openmath.org/OpenMathCD">
  <CDName>meta</CDName>
  <CDDefinition>
    <Name>CDName</Name>
    <Description>The name element of a dictionary</Description>
  </CDDefinition>
</CD>"#,
        )
        .unwrap();
        std::fs::write(
            dir.join("arith1.sts"),
            r#"<CDSignatures type="sts" cd="arith1" xmlns="http://www.openmath.org/OpenMathCDS">
  <Signature name="gcd">
    <OMOBJ xmlns="http://www.openmath.org/OpenMath">
      <OMA>
        <OMS cd="sts" name="mapsto"/>
        <OMA><OMS cd="sts" name="nassoc"/><OMV name="SemiGroup"/></OMA>
        <OMV name="SemiGroup"/>
      </OMA>
    </OMOBJ>
  </Signature>
</CDSignatures>"#,
        )
        .unwrap();
    }

    #[test]
    fn builds_filters_and_attaches_signatures() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path());
        let filters = FilterList {
            cds: vec!["meta".into()],
            symbols: vec![],
        };
        let kb = build_kb(dir.path(), &filters).unwrap();
        assert_eq!(
            kb.counts,
            KbCounts {
                cds: 2,
                symbols: 3,
                filtered: 1,
                indexed: 2
            }
        );
        let gcd = kb.get("arith1:gcd").unwrap();
        assert_eq!(
            gcd.description,
            "Greatest common divisor of two or more integers"
        );
        assert_eq!(gcd.cmps, vec!["gcd(a,b) * lcm(a,b) = a * b".to_string()]);
        assert_eq!(gcd.examples, vec!["gcd(6,9) = 3".to_string()]);
        assert_eq!(gcd.fmp_count, 1);
        assert_eq!(
            gcd.signature.as_deref(),
            Some("nassoc(SemiGroup) -> SemiGroup")
        );
        assert!(kb.get("meta:CDName").is_none());
    }

    #[test]
    fn deterministic_across_rebuilds() {
        let dir = tempfile::tempdir().unwrap();
        write_corpus(dir.path());
        let filters = FilterList::default();
        let a = build_kb(dir.path(), &filters).unwrap();
        let b = build_kb(dir.path(), &filters).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn malformed_xml_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad.ocd"), "<CD><unclosed").unwrap();
        let err = build_kb(dir.path(), &FilterList::default()).unwrap_err();
        assert!(err.to_string().contains("bad.ocd"), "{err}");
    }
}
