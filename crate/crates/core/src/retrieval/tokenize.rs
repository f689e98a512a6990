//! Tokenization for lexical retrieval: lowercase alphanumeric runs, LaTeX
//! commands stripped of their backslash, stopwords removed.

use std::collections::BTreeSet;
use std::path::Path;

use crate::util::{read_json, UtilError};

/// Split `text` into lowercase alphanumeric tokens and drop stopwords.
///
/// Every non-alphanumeric character (including `\`, so LaTeX commands keep
/// only their name) is a separator. Deterministic by construction.
pub fn tokenize(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens.retain(|t| !stopwords.contains(t));
    tokens
}

/// Minimum stopword-list size accepted from config.
pub const MIN_STOPWORDS: usize = 70;

/// Load the stopword list (a JSON array of strings) from a config asset.
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>, UtilError> {
    let words: Vec<String> = read_json(path)?;
    if words.len() < MIN_STOPWORDS {
        return Err(UtilError::Invalid {
            path: path.display().to_string(),
            message: format!(
                "stopword list has {} entries; at least {MIN_STOPWORDS} required",
                words.len()
            ),
        });
    }
    Ok(words.into_iter().map(|w| w.to_lowercase()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn applies_stopwords_and_lowercases() {
        let sw = set(&["the", "is", "common"]);
        assert_eq!(
            tokenize("The greatest common divisor is gcd", &sw),
            vec!["greatest", "divisor", "gcd"]
        );
    }

    #[test]
    fn empty_text_yields_no_tokens() {
        assert_eq!(tokenize("", &BTreeSet::new()), Vec::<String>::new());
    }

    #[test]
    fn strips_latex_command_backslashes() {
        assert_eq!(
            tokenize("\\gcd(a,b)", &BTreeSet::new()),
            vec!["gcd", "a", "b"]
        );
    }

    #[test]
    fn splits_on_underscores_and_digits_stay() {
        assert_eq!(
            tokenize("is_commutative x2", &set(&["is"])),
            vec!["commutative", "x2"]
        );
    }

    #[test]
    fn stopword_load_rejects_short_lists() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stopwords.json");
        crate::util::write_json(&path, &vec!["a"; 10]).unwrap();
        assert!(load_stopwords(&path).is_err());
        let many: Vec<String> = (0..80).map(|i| format!("w{i}")).collect();
        crate::util::write_json(&path, &many).unwrap();
        assert_eq!(load_stopwords(&path).unwrap().len(), 80);
    }
}
