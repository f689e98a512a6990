//! Parser for `.ocd` content-dictionary files.

use std::path::Path;

use super::KbError;

/// A parsed dictionary file.
#[derive(Debug, Clone)]
pub struct CdFile {
    /// Dictionary name from the `CDName` element.
    pub name: String,
    pub symbols: Vec<RawSymbol>,
}

/// A symbol definition as it appears in the dictionary, before filtering.
#[derive(Debug, Clone)]
pub struct RawSymbol {
    pub name: String,
    pub description: String,
    pub cmps: Vec<String>,
    pub examples: Vec<String>,
    pub fmp_count: usize,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Concatenated text content of an element (descendant text nodes).
fn text_of(node: roxmltree::Node) -> String {
    let mut out = String::new();
    for d in node.descendants().filter(|d| d.is_text()) {
        if let Some(t) = d.text() {
            out.push_str(t);
            out.push(' ');
        }
    }
    collapse_ws(&out)
}

/// Parse one `.ocd` file.
pub fn parse_cd_file(path: &Path) -> Result<CdFile, KbError> {
    let xml = std::fs::read_to_string(path).map_err(|e| KbError::MalformedCd {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let doc = roxmltree::Document::parse(&xml).map_err(|e| KbError::MalformedCd {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "CD" {
        return Err(KbError::MalformedCd {
            path: path.display().to_string(),
            detail: format!(
                "root element is <{}>, expected <CD>",
                root.tag_name().name()
            ),
        });
    }
    let name = root
        .children()
        .find(|c| c.tag_name().name() == "CDName")
        .map(text_of)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| KbError::MalformedCd {
            path: path.display().to_string(),
            detail: "missing CDName".into(),
        })?;

    let mut symbols = Vec::new();
    for def in root
        .children()
        .filter(|c| c.tag_name().name() == "CDDefinition")
    {
        let sym_name = def
            .children()
            .find(|c| c.tag_name().name() == "Name")
            .map(text_of)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| KbError::MalformedCd {
                path: path.display().to_string(),
                detail: "CDDefinition missing Name".into(),
            })?;
        let description = def
            .children()
            .find(|c| c.tag_name().name() == "Description")
            .map(text_of)
            .unwrap_or_default();
        let cmps = def
            .children()
            .filter(|c| c.tag_name().name() == "CMP")
            .map(text_of)
            .filter(|s| !s.is_empty())
            .collect();
        let examples = def
            .children()
            .filter(|c| c.tag_name().name() == "Example")
            .map(text_of)
            .filter(|s| !s.is_empty())
            .collect();
        let fmp_count = def
            .children()
            .filter(|c| c.tag_name().name() == "FMP")
            .count();
        symbols.push(RawSymbol {
            name: sym_name,
            description,
            cmps,
            examples,
            fmp_count,
        });
    }
    Ok(CdFile { name, symbols })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_is_collapsed() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.ocd");
        std::fs::write(
            &p,
            "<CD><CDName>t</CDName><CDDefinition><Name>f</Name><Description>  a\n   b\t c </Description></CDDefinition></CD>",
        )
        .unwrap();
        let cd = parse_cd_file(&p).unwrap();
        assert_eq!(cd.symbols[0].description, "a b c");
    }

    #[test]
    fn missing_name_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.ocd");
        std::fs::write(
            &p,
            "<CD><CDName>t</CDName><CDDefinition><Description>x</Description></CDDefinition></CD>",
        )
        .unwrap();
        assert!(parse_cd_file(&p).is_err());
    }
}
