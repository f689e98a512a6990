//! Parser for `.sts` type-signature files.
//!
//! Signatures are OpenMath objects built from `OMS`/`OMV`/`OMA` nodes. They
//! are rendered to a compact human-readable string: an application of the
//! `mapsto` head becomes `"arg1, arg2 -> result"`, any other application
//! becomes `"head(arg1, arg2)"`, and symbols/variables render as their
//! names, e.g. `nassoc(SemiGroup) -> SemiGroup`.

use std::path::Path;

use super::KbError;

/// Parse one `.sts` file into `(cd, symbol_name, rendered_signature)` rows.
pub fn parse_sts_file(path: &Path) -> Result<Vec<(String, String, String)>, KbError> {
    let xml = std::fs::read_to_string(path).map_err(|e| KbError::MalformedCd {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let doc = roxmltree::Document::parse(&xml).map_err(|e| KbError::MalformedCd {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "CDSignatures" {
        return Err(KbError::MalformedCd {
            path: path.display().to_string(),
            detail: format!(
                "root element is <{}>, expected <CDSignatures>",
                root.tag_name().name()
            ),
        });
    }
    let cd = root.attribute("cd").unwrap_or_default().to_string();
    if cd.is_empty() {
        return Err(KbError::MalformedCd {
            path: path.display().to_string(),
            detail: "CDSignatures missing cd attribute".into(),
        });
    }

    let mut out = Vec::new();
    for sig in root
        .children()
        .filter(|c| c.tag_name().name() == "Signature")
    {
        let Some(name) = sig.attribute("name").map(str::to_string) else {
            log::warn!(
                "{}: Signature without name attribute skipped",
                path.display()
            );
            continue;
        };
        let rendered = sig
            .descendants()
            .find(|d| d.tag_name().name() == "OMOBJ")
            .and_then(first_om_child)
            .map(render_om);
        match rendered {
            Some(r) => out.push((cd.clone(), name, r)),
            None => log::warn!("{}: empty signature for {name}", path.display()),
        }
    }
    Ok(out)
}

fn is_om_node(n: &roxmltree::Node) -> bool {
    matches!(n.tag_name().name(), "OMS" | "OMV" | "OMA" | "OMI")
}

fn first_om_child<'a>(n: roxmltree::Node<'a, 'a>) -> Option<roxmltree::Node<'a, 'a>> {
    n.children().find(is_om_node)
}

/// Render an OpenMath node to the compact signature syntax.
fn render_om(node: roxmltree::Node) -> String {
    match node.tag_name().name() {
        "OMS" => node.attribute("name").unwrap_or("?").to_string(),
        "OMV" => node.attribute("name").unwrap_or("?").to_string(),
        "OMI" => node.text().unwrap_or("?").trim().to_string(),
        "OMA" => {
            let parts: Vec<_> = node.children().filter(is_om_node).collect();
            if parts.is_empty() {
                return "?".into();
            }
            let head = render_om(parts[0]);
            let args: Vec<String> = parts[1..].iter().map(|n| render_om(*n)).collect();
            if head == "mapsto" && !args.is_empty() {
                let (ret, ins) = args.split_last().expect("non-empty");
                format!("{} -> {}", ins.join(", "), ret)
            } else {
                format!("{}({})", head, args.join(", "))
            }
        }
        _ => "?".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_mapsto_and_nested_applications() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.sts");
        std::fs::write(
            &p,
            r#"<CDSignatures cd="arith1">
  <Signature name="gcd">
    <OMOBJ><OMA><OMS cd="sts" name="mapsto"/>
      <OMA><OMS cd="sts" name="nassoc"/><OMV name="SemiGroup"/></OMA>
      <OMV name="SemiGroup"/>
    </OMA></OMOBJ>
  </Signature>
  <Signature name="plus">
    <OMOBJ><OMA><OMS cd="sts" name="mapsto"/>
      <OMV name="X"/><OMV name="X"/><OMV name="X"/>
    </OMA></OMOBJ>
  </Signature>
</CDSignatures>"#,
        )
        .unwrap();
        let sigs = parse_sts_file(&p).unwrap();
        assert_eq!(
            sigs[0],
            (
                "arith1".into(),
                "gcd".into(),
                "nassoc(SemiGroup) -> SemiGroup".into()
            )
        );
        assert_eq!(
            sigs[1],
            ("arith1".into(), "plus".into(), "X, X -> X".into())
        );
    }
}
