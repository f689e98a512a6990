//! Minimal LaTeX well-formedness check for normalized output.
//!
//! This is not a LaTeX engine: it validates a conservative token grammar
//! sufficient to catch the failure modes that matter downstream (unbalanced
//! groups, dangling scripts, raw special characters, broken control
//! sequences). Anything it accepts renders as plausible math-mode LaTeX.

/// Escapable single characters (`\_`, `\%`, …) and spacing controls.
const ESCAPABLE: &[char] = &[
    '{', '}', '_', '$', '%', '#', '&', ',', ';', '!', ':', ' ', '\\',
];

/// Validate a LaTeX fragment against the minimal token grammar.
pub fn latex_valid(s: &str) -> bool {
    if s.trim().is_empty() {
        return false;
    }
    let chars: Vec<char> = s.chars().collect();
    let mut brace_depth = 0i64;
    let mut bracket_depth = 0i64;
    let mut dollars = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\\' => {
                let Some(&next) = chars.get(i + 1) else {
                    return false; // dangling backslash
                };
                if next.is_ascii_alphabetic() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    continue;
                } else if ESCAPABLE.contains(&next) {
                    i += 2;
                    continue;
                }
                return false; // unknown escape like `\7`
            }
            '{' => brace_depth += 1,
            '}' => {
                brace_depth -= 1;
                if brace_depth < 0 {
                    return false;
                }
            }
            '[' => bracket_depth += 1,
            ']' => {
                bracket_depth -= 1;
                if bracket_depth < 0 {
                    return false;
                }
            }
            '$' => dollars += 1,
            '^' | '_' => {
                // a script must be followed by a group, a command, or a
                // single alphanumeric atom
                let mut j = i + 1;
                while j < chars.len() && chars[j] == ' ' {
                    j += 1;
                }
                match chars.get(j) {
                    Some('{') | Some('\\') => {}
                    Some(a) if a.is_ascii_alphanumeric() => {}
                    _ => return false,
                }
            }
            '%' | '#' | '&' => return false, // must be escaped
            _ => {}
        }
        i += 1;
    }
    brace_depth == 0 && bracket_depth == 0 && dollars.is_multiple_of(2)
}
