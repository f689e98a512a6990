//! Labeled answer pairs exercising the equivalence decision procedure:
//! surface-level LaTeX variation, numeric forms, collections, and text, each
//! marked with the expected verdict.

use serde::{Deserialize, Serialize};

/// One labeled comparison case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnswerPair {
    pub a: String,
    pub b: String,
    pub equivalent: bool,
}

/// (a, b) pairs the checker must accept.
const EQUIVALENT: &[(&str, &str)] = &[
    ("\\frac{1}{2}", "0.5"),
    ("$42$", "42"),
    ("x^2-1", "(x-1)(x+1)"),
    ("2\\pi", "\\pi*2"),
    ("\\sqrt{2}", "2^{1/2}"),
    ("(3, 4)", "(3,4)"),
    ("{1, 2, 3}", "{3, 1, 2}"),
    ("Even", "even"),
    ("10,\\!080", "10080"),
    ("\\dfrac{3}{4}", "3/4"),
    ("0.25", "\\frac{1}{4}"),
    ("-\\frac{2}{3}", "-2/3"),
    ("\\left(1, 2\\right)", "(1,2)"),
    ("x(x+2)", "x^2+2x"),
    ("\\sin^2x+\\cos^2x", "1"),
    ("2^3", "8"),
    ("\\frac{x+1}{2}", "(x+1)/2"),
    ("1,234", "1234"),
    ("{-1, 1}", "{1, -1}"),
    ("\\frac{\\pi}{4}", "0.25\\pi"),
    ("\\frac{1}{3}", "0.3333333333333333"),
    ("\\sqrt{9}", "3"),
    ("|-5|", "5"),
    ("\\frac{6}{8}", "\\frac{3}{4}"),
    ("0.1+0.2", "0.3"),
    ("(x+y)^2", "x^2+2xy+y^2"),
    ("3.0", "3"),
    ("(0, 1]", "(0,1]"),
    ("5!", "120"),
    ("\\log_28", "3"),
    ("x/2", "0.5x"),
    ("\\sqrt[3]{27}", "3"),
    ("1/4+1/4", "1/2"),
    ("2(a+b)", "2a+2b"),
    ("-0.5", "-\\frac{1}{2}"),
    ("{2}", "2"),
    ("\\frac{4}{6}", "2/3"),
    ("(1/2, 3/4)", "(0.5, 0.75)"),
    ("yes", "Yes"),
    ("e^0", "1"),
];

/// (a, b) pairs the checker must reject.
const NOT_EQUIVALENT: &[(&str, &str)] = &[
    ("3", "4"),
    ("x+1", "x-1"),
    ("(3,4)", "(4,3)"),
    ("{1,2}", "{1,3}"),
    ("[0,1)", "(0,1)"),
    ("no", "on"),
    ("even", "odd"),
    ("", "0"),
    ("x+1", "x+1.0000002"),
    ("1/2", "1/3"),
    ("2\\pi", "6.28"),
    ("x^2", "x^3"),
    ("{1,2,3}", "{1,2}"),
    ("(1,2)", "[1,2]"),
    ("\\sqrt{2}", "1.414"),
    ("x+y", "x-y"),
    ("5!", "24"),
    ("0.1", "0.11"),
    ("-3/4", "3/4"),
    ("\\frac{1}{2}", "\\frac{1}{3}"),
    ("x", "y"),
    ("2^10", "1000"),
    ("\\log_28", "4"),
    ("(x+1)^2", "x^2+1"),
    ("\\sin x", "\\cos x"),
    ("1,234", "1,243"),
    ("{1,2}", "(1,2)"),
    ("3.14", "\\pi"),
    ("x^2-1", "(x-1)(x+2)"),
    ("e", "2.718"),
    ("1/0", "2"),
    ("0.5", "1/3"),
    ("10", "-10"),
    ("\\sqrt{4}", "-2"),
    ("a+b", "a*b"),
    ("7", "7.1"),
    ("111", "1111"),
    ("(1,2,3)", "(1,2)"),
    ("one", "1"),
    ("x+2", "2x"),
];

/// All labeled pairs: the accept list followed by the reject list.
pub fn answer_pairs() -> Vec<AnswerPair> {
    EQUIVALENT
        .iter()
        .map(|&(a, b)| AnswerPair {
            a: a.into(),
            b: b.into(),
            equivalent: true,
        })
        .chain(NOT_EQUIVALENT.iter().map(|&(a, b)| AnswerPair {
            a: a.into(),
            b: b.into(),
            equivalent: false,
        }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::answers_equivalent;

    #[test]
    fn fixture_has_forty_of_each_label() {
        let pairs = answer_pairs();
        let pos = pairs.iter().filter(|p| p.equivalent).count();
        let neg = pairs.len() - pos;
        assert!(pos >= 40, "need at least 40 equivalent pairs, have {pos}");
        assert!(
            neg >= 40,
            "need at least 40 non-equivalent pairs, have {neg}"
        );
    }

    #[test]
    fn checker_matches_every_label() {
        for pair in answer_pairs() {
            assert_eq!(
                answers_equivalent(&pair.a, &pair.b),
                pair.equivalent,
                "pair ({:?}, {:?}) expected equivalent={}",
                pair.a,
                pair.b,
                pair.equivalent
            );
        }
    }

    #[test]
    fn pairs_serialize_round_trip() {
        let pairs = answer_pairs();
        let json = serde_json::to_string(&pairs).unwrap();
        let back: Vec<AnswerPair> = serde_json::from_str(&json).unwrap();
        assert_eq!(back.len(), pairs.len());
        for (x, y) in pairs.iter().zip(back.iter()) {
            assert_eq!((&x.a, &x.b, x.equivalent), (&y.a, &y.b, y.equivalent));
        }
    }
}
