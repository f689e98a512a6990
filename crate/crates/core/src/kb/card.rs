//! Description cards: the retrieval-unit text for a symbol.

use super::SymbolEntry;

/// Render the description card used as the BM25/embedding document and as
/// the source for prompt context blocks.
///
/// Layout (lines present only when the field is non-empty):
///
/// ```text
/// Symbol: arith1:gcd
/// Description: Greatest common divisor of two or more integers
/// Type: nassoc(SemiGroup) -> SemiGroup
/// Properties: gcd(a,b) * lcm(a,b) = a * b
/// Examples: gcd(6,9) = 3
/// ```
pub fn description_card(entry: &SymbolEntry) -> String {
    let mut out = format!("Symbol: {}\n", entry.symbol_id);
    if !entry.description.is_empty() {
        out.push_str(&format!("Description: {}\n", entry.description));
    }
    if let Some(sig) = &entry.signature {
        out.push_str(&format!("Type: {sig}\n"));
    }
    if !entry.cmps.is_empty() {
        out.push_str(&format!("Properties: {}\n", entry.cmps.join("; ")));
    }
    if !entry.examples.is_empty() {
        out.push_str(&format!("Examples: {}\n", entry.examples.join("; ")));
    }
    out.trim_end().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::SymbolEntry;

    #[test]
    fn renders_all_fields_in_order() {
        let e = SymbolEntry {
            symbol_id: "arith1:gcd".into(),
            cd: "arith1".into(),
            name: "gcd".into(),
            description: "Greatest common divisor of two or more integers".into(),
            cmps: vec!["gcd(a,b) * lcm(a,b) = a * b".into()],
            examples: vec!["gcd(6,9) = 3".into()],
            fmp_count: 1,
            signature: Some("nassoc(SemiGroup) -> SemiGroup".into()),
        };
        let card = description_card(&e);
        assert_eq!(
            card,
            "Symbol: arith1:gcd\n\
             Description: Greatest common divisor of two or more integers\n\
             Type: nassoc(SemiGroup) -> SemiGroup\n\
             Properties: gcd(a,b) * lcm(a,b) = a * b\n\
             Examples: gcd(6,9) = 3"
        );
    }

    #[test]
    fn omits_empty_sections() {
        let e = SymbolEntry {
            symbol_id: "x:y".into(),
            cd: "x".into(),
            name: "y".into(),
            description: "d".into(),
            cmps: vec![],
            examples: vec![],
            fmp_count: 0,
            signature: None,
        };
        assert_eq!(description_card(&e), "Symbol: x:y\nDescription: d");
    }
}
