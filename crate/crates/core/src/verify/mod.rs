//! Answer equivalence: canonicalize answer strings, classify their shape,
//! and decide equivalence via exact comparison, element-wise tuple/set
//! comparison, or a numeric sampling oracle for symbolically different
//! expressions.

mod eval;
mod parse;

pub use eval::{
    eval, free_vars, numeric_equivalence, numeric_equivalence_seeded, ABS_FLOOR,
    DEFAULT_ORACLE_SEED, DEFAULT_TOL, DEFAULT_TRIALS, MAX_FREE_VARS,
};
pub use parse::{parse_expression, Ast, MathFn};

use serde::{Deserialize, Serialize};

/// Shape of a canonicalized answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Number,
    Expression,
    TupleOrSet,
    Text,
}

/// A canonicalized answer string and its classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerForm {
    pub raw: String,
    pub canonical: String,
    pub kind: AnswerKind,
}

/// Canonicalize an answer string. The transformation is idempotent: running
/// it on its own output returns the same canonical string.
pub fn normalize_answer(raw: &str) -> AnswerForm {
    let mut s = raw.trim().to_string();
    // strip wrapping math-mode dollar signs ($...$ and $$...$$)
    loop {
        let t = s.trim();
        if t.len() >= 2 && t.starts_with('$') && t.ends_with('$') {
            s = t[1..t.len() - 1].to_string();
        } else {
            s = t.to_string();
            break;
        }
    }
    // drop sizing / spacing / style commands that carry no content
    s = s.replace("\\left", "").replace("\\right", "");
    s = s.replace("\\dfrac", "\\frac").replace("\\tfrac", "\\frac");
    s = s.replace("\\cdot", "*").replace("\\times", "*");
    for gap in ["\\,", "\\;", "\\!", "\\ "] {
        s = s.replace(gap, "");
    }
    s = s.replace('~', " ");
    // single-word answers keep exactly one form of spacing: none
    s = s.chars().filter(|c| !c.is_whitespace()).collect();
    s = rewrite_fractions(&s);
    s = merge_digit_group_commas(&s);
    s = strip_redundant_outer_braces(&s);
    let kind = classify(&s);
    AnswerForm {
        raw: raw.to_string(),
        canonical: s,
        kind,
    }
}

/// Rewrite `\frac{A}{B}` as `A/B` (atoms) or `(A)/(B)` (compound parts),
/// innermost first.
fn rewrite_fractions(s: &str) -> String {
    let mut out = s.to_string();
    let mut guard = 0;
    while let Some(idx) = out.rfind("\\frac") {
        guard += 1;
        if guard > 64 {
            return s.to_string(); // pathological nesting; leave untouched
        }
        let after = idx + "\\frac".len();
        let Some((a, rest1)) = take_brace_group(&out[after..]) else {
            // no brace groups to rewrite; leave the remaining text as-is
            return out;
        };
        let Some((b, rest2)) = take_brace_group(rest1) else {
            return out;
        };
        let consumed = out[after..].len() - rest2.len();
        let rendered = format!("{}/{}", atom_or_parens(a), atom_or_parens(b));
        out = format!("{}{}{}", &out[..idx], rendered, &out[after + consumed..]);
    }
    out
}

fn atom_or_parens(part: &str) -> String {
    let is_atom = !part.is_empty()
        && (part.chars().all(|c| c.is_ascii_alphanumeric() || c == '.')
            || (part.starts_with('\\') && part[1..].chars().all(|c| c.is_ascii_alphabetic())));
    if is_atom {
        part.to_string()
    } else {
        format!("({part})")
    }
}

/// Take a `{...}` group off the front of `s`; returns (contents, remainder).
fn take_brace_group(s: &str) -> Option<(&str, &str)> {
    if !s.starts_with('{') {
        return None;
    }
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some((&s[1..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

/// `10,080` (digit-grouping commas over the whole string) becomes `10080`.
/// Bracketed strings are left alone — `(3,400)` stays a pair.
fn merge_digit_group_commas(s: &str) -> String {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut chunks = body.split(',');
    let Some(first) = chunks.next() else {
        return s.to_string();
    };
    if !(1..=3).contains(&first.len()) || !first.chars().all(|c| c.is_ascii_digit()) {
        return s.to_string();
    }
    let mut any = false;
    for chunk in chunks {
        if chunk.len() != 3 || !chunk.chars().all(|c| c.is_ascii_digit()) {
            return s.to_string();
        }
        any = true;
    }
    if any {
        s.replace(',', "")
    } else {
        s.to_string()
    }
}

fn strip_redundant_outer_braces(s: &str) -> String {
    let mut out = s.to_string();
    loop {
        if !(out.starts_with('{') && out.ends_with('}') && out.len() >= 2) {
            return out;
        }
        let inner = &out[1..out.len() - 1];
        // the braces must wrap the whole string and not delimit a set
        let mut depth = 0i32;
        let mut top_comma = false;
        let mut wraps = true;
        for (i, c) in inner.char_indices() {
            match c {
                '{' | '(' | '[' => depth += 1,
                '}' | ')' | ']' => {
                    depth -= 1;
                    if depth < 0 {
                        wraps = false;
                        break;
                    }
                }
                ',' if depth == 0 => top_comma = true,
                _ => {}
            }
            let _ = i;
        }
        if wraps && depth == 0 && !top_comma {
            out = inner.to_string();
        } else {
            return out;
        }
    }
}

/// Split a canonical string's top-level comma elements, honoring all three
/// bracket pairs. Returns `None` when there is no top-level comma.
fn split_top_level(s: &str) -> Option<Vec<String>> {
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0usize;
    let mut found = false;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                found = true;
                parts.push(s[start..i].to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    if !found {
        return None;
    }
    parts.push(s[start..].to_string());
    Some(parts)
}

/// Bracket signature and element list of a tuple/set/interval answer.
struct Collection {
    open: char,
    close: char,
    elements: Vec<String>,
}

fn as_collection(canonical: &str) -> Option<Collection> {
    let mut chars = canonical.chars();
    let first = chars.next()?;
    let last = canonical.chars().last()?;
    if "([{".contains(first) && ")]}".contains(last) && canonical.len() >= 2 {
        let inner = &canonical[first.len_utf8()..canonical.len() - last.len_utf8()];
        // require the brackets to wrap the whole string
        let mut depth = 0i32;
        for c in inner.chars() {
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => {
                    depth -= 1;
                    if depth < 0 {
                        return None;
                    }
                }
                _ => {}
            }
        }
        if depth != 0 {
            return None;
        }
        if let Some(elements) = split_top_level(inner) {
            return Some(Collection {
                open: first,
                close: last,
                elements,
            });
        }
        if first == '{' {
            // singleton set
            return Some(Collection {
                open: first,
                close: last,
                elements: vec![inner.to_string()],
            });
        }
        return None;
    }
    // bare comma list: "3,4"
    split_top_level(canonical).map(|elements| Collection {
        open: '\0',
        close: '\0',
        elements,
    })
}

fn parse_plain_number(s: &str) -> Option<f64> {
    if s.is_empty() {
        return None;
    }
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    // integer ratio: -3/4
    let (num, den) = s.split_once('/')?;
    let n: i64 = num.parse().ok()?;
    let d: i64 = den.parse().ok()?;
    (d != 0).then(|| n as f64 / d as f64)
}

fn classify(canonical: &str) -> AnswerKind {
    if canonical.is_empty() {
        return AnswerKind::Text;
    }
    if as_collection(canonical).is_some() {
        return AnswerKind::TupleOrSet;
    }
    if parse_plain_number(canonical).is_some() {
        return AnswerKind::Number;
    }
    // Plain words are text even when every letter could be a variable;
    // otherwise "no" and "on" would compare equal as commuted products.
    // "pi" is the lone all-letter string with a numeric meaning.
    if canonical.len() >= 2
        && canonical.chars().all(|c| c.is_ascii_alphabetic())
        && canonical != "pi"
    {
        return AnswerKind::Text;
    }
    if parse_expression(canonical).is_some() {
        return AnswerKind::Expression;
    }
    AnswerKind::Text
}

/// Decide whether two answer strings are equivalent.
///
/// Order of escalation: canonical string equality, element-wise collection
/// comparison (sets ignore order, tuples and intervals do not), numeric
/// comparison of parsed expressions via the sampling oracle, and finally
/// case-insensitive text comparison.
pub fn answers_equivalent(a: &str, b: &str) -> bool {
    let fa = normalize_answer(a);
    let fb = normalize_answer(b);
    forms_equivalent(&fa, &fb)
}

fn forms_equivalent(fa: &AnswerForm, fb: &AnswerForm) -> bool {
    if !fa.canonical.is_empty() && fa.canonical == fb.canonical {
        return true;
    }
    if fa.kind == AnswerKind::TupleOrSet || fb.kind == AnswerKind::TupleOrSet {
        let (Some(ca), Some(cb)) = (as_collection(&fa.canonical), as_collection(&fb.canonical))
        else {
            return false;
        };
        if ca.open != cb.open || ca.close != cb.close || ca.elements.len() != cb.elements.len() {
            return false;
        }
        if ca.open == '{' {
            return multiset_match(&ca.elements, &cb.elements);
        }
        return ca
            .elements
            .iter()
            .zip(cb.elements.iter())
            .all(|(x, y)| answers_equivalent(x, y));
    }
    let numericish = |k: AnswerKind| matches!(k, AnswerKind::Number | AnswerKind::Expression);
    if numericish(fa.kind) && numericish(fb.kind) {
        if let (Some(e1), Some(e2)) = (
            parse_expression(&fa.canonical),
            parse_expression(&fb.canonical),
        ) {
            return numeric_equivalence(&e1, &e2, DEFAULT_TRIALS, DEFAULT_TOL);
        }
        return false;
    }
    if fa.kind == AnswerKind::Text && fb.kind == AnswerKind::Text {
        return fa.canonical.eq_ignore_ascii_case(&fb.canonical);
    }
    false
}

/// Order-insensitive matching of set elements (backtracking; sets in answers
/// are small).
fn multiset_match(xs: &[String], ys: &[String]) -> bool {
    fn go(xs: &[String], used: &mut Vec<bool>, ys: &[String], i: usize) -> bool {
        if i == xs.len() {
            return true;
        }
        for (j, y) in ys.iter().enumerate() {
            if !used[j] && answers_equivalent(&xs[i], y) {
                used[j] = true;
                if go(xs, used, ys, i + 1) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; ys.len()];
    go(xs, &mut used, ys, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_published_examples() {
        assert_eq!(normalize_answer("\\frac{1}{2}").canonical, "1/2");
        assert_eq!(normalize_answer("$42$").canonical, "42");
        assert_eq!(normalize_answer("\\left( 3, 4 \\right)").canonical, "(3,4)");
    }

    #[test]
    fn classifies_kinds() {
        assert_eq!(normalize_answer("42").kind, AnswerKind::Number);
        assert_eq!(normalize_answer("-3/4").kind, AnswerKind::Number);
        assert_eq!(normalize_answer("x^2-1").kind, AnswerKind::Expression);
        assert_eq!(normalize_answer("2\\pi").kind, AnswerKind::Expression);
        assert_eq!(normalize_answer("(3, 4)").kind, AnswerKind::TupleOrSet);
        assert_eq!(normalize_answer("{1, 2, 3}").kind, AnswerKind::TupleOrSet);
        assert_eq!(normalize_answer("[0, 1)").kind, AnswerKind::TupleOrSet);
        assert_eq!(normalize_answer("odd").kind, AnswerKind::Text);
        assert_eq!(normalize_answer("no real solutions").kind, AnswerKind::Text);
        assert_eq!(normalize_answer("\\text{even}").kind, AnswerKind::Text);
    }

    #[test]
    fn normalization_is_idempotent() {
        for raw in [
            "\\frac{1}{2}",
            "$42$",
            "\\left( 3, 4 \\right)",
            "\\dfrac{x+1}{2}",
            "  {5}  ",
            "10,\\!080",
            "\\sqrt{2}",
            "half of it",
            "{1, 2}",
            "$\\frac{\\pi}{4}$",
        ] {
            let once = normalize_answer(raw);
            let twice = normalize_answer(&once.canonical);
            assert_eq!(once.canonical, twice.canonical, "raw: {raw:?}");
            assert_eq!(once.kind, twice.kind, "raw: {raw:?}");
        }
    }

    #[test]
    fn digit_grouping_commas_merge_only_bare_numbers() {
        assert_eq!(normalize_answer("10,\\!080").canonical, "10080");
        assert_eq!(normalize_answer("1,234,567").canonical, "1234567");
        assert_eq!(normalize_answer("(3,400)").canonical, "(3,400)");
        assert_eq!(normalize_answer("12,34").canonical, "12,34"); // not grouping
    }

    #[test]
    fn nested_fractions_rewrite() {
        assert_eq!(
            normalize_answer("\\frac{\\frac{1}{2}}{3}").canonical,
            "(1/2)/3"
        );
        assert_eq!(normalize_answer("\\frac{x+1}{2}").canonical, "(x+1)/2");
    }

    #[test]
    fn equivalence_accepts_surface_variation() {
        assert!(answers_equivalent("\\frac{1}{2}", "0.5"));
        assert!(answers_equivalent("$42$", "42"));
        assert!(answers_equivalent("x^2-1", "(x-1)(x+1)"));
        assert!(answers_equivalent("2\\pi", "\\pi*2"));
        assert!(answers_equivalent("\\sqrt{2}", "2^{1/2}"));
        assert!(answers_equivalent("(3, 4)", "(3,4)"));
        assert!(answers_equivalent("{1, 2, 3}", "{3, 1, 2}"));
        assert!(answers_equivalent("Even", "even"));
        assert!(answers_equivalent("10,\\!080", "10080"));
    }

    #[test]
    fn equivalence_rejects_different_values() {
        assert!(!answers_equivalent("3", "4"));
        assert!(!answers_equivalent("x+1", "x-1"));
        assert!(!answers_equivalent("(3,4)", "(4,3)"));
        assert!(!answers_equivalent("{1,2}", "{1,3}"));
        assert!(!answers_equivalent("[0,1)", "(0,1)"));
        assert!(!answers_equivalent("no", "on"));
        assert!(!answers_equivalent("even", "odd"));
        assert!(!answers_equivalent("", "0"));
    }

    #[test]
    fn set_with_expression_elements_matches_out_of_order() {
        assert!(answers_equivalent("{\\frac{1}{2}, 2}", "{2, 0.5}"));
    }

    #[test]
    fn bracket_signature_must_match() {
        assert!(!answers_equivalent("(1,2)", "[1,2]"));
        assert!(!answers_equivalent("{1,2}", "(1,2)"));
    }
}
