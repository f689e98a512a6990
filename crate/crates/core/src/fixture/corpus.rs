//! Deterministic content-dictionary corpus generator.
//!
//! Produces a 156-dictionary corpus: 150 mathematical dictionaries (1,055
//! symbol definitions) plus six protocol/meta dictionaries (83 definitions)
//! that the bundled filter list excludes wholesale. Field text is drawn from
//! a fixed-seed stream over template families chosen so that the offline
//! pattern grammar converts a known, stable fraction of fields; the
//! remainder exercises the model-fallback and manual-correction paths.

use std::io;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::kb::FilterList;
use crate::normalize::{escape_text, CorrectionRecord};

/// Seed for the corpus field stream.
const CORPUS_SEED: u64 = 0x6f63_645f_636f_7270;

/// (base name, topic adjective) for the 70 mathematical dictionary families.
/// The first ten bases get three numbered dictionaries, the rest two.
const MATH_CD_BASES: &[(&str, &str)] = &[
    ("alg", "algebraic"),
    ("angle", "angular"),
    ("arith", "arithmetic"),
    ("bigfloat", "arbitrary precision"),
    ("boolean", "boolean"),
    ("calculus", "differential"),
    ("cardinal", "cardinal"),
    ("choice", "combinatorial choice"),
    ("circle", "circular"),
    ("combinat", "combinatorial"),
    ("complex", "complex"),
    ("congruence", "congruence"),
    ("coord", "coordinate"),
    ("determinant", "determinant"),
    ("deriv", "derivative"),
    ("dist", "distribution"),
    ("divisor", "divisibility"),
    ("eigen", "spectral"),
    ("exp", "exponential"),
    ("field", "field"),
    ("fns", "functional"),
    ("frac", "fractional"),
    ("graph", "graph"),
    ("group", "group"),
    ("integer", "integer"),
    ("interval", "interval"),
    ("lattice", "lattice"),
    ("limit", "limit"),
    ("linalg", "linear algebra"),
    ("list", "list"),
    ("logic", "logical"),
    ("matrix", "matrix"),
    ("measure", "measure"),
    ("minmax", "extremal"),
    ("mod", "modular"),
    ("multiset", "multiset"),
    ("norm", "normed"),
    ("nums", "numeric"),
    ("order", "order"),
    ("percent", "percentage"),
    ("perm", "permutation"),
    ("piece", "piecewise"),
    ("plangeo", "plane geometry"),
    ("poly", "polynomial"),
    ("polygon", "polygonal"),
    ("power", "power"),
    ("prime", "prime"),
    ("prob", "probability"),
    ("quant", "quantifier"),
    ("ratio", "ratio"),
    ("relation", "relational"),
    ("ring", "ring"),
    ("root", "radical"),
    ("rounding", "rounding"),
    ("sample", "sampling"),
    ("sequence", "sequence"),
    ("series", "series"),
    ("set", "set"),
    ("setname", "named set"),
    ("solid", "solid geometry"),
    ("stats", "statistical"),
    ("sum", "summation"),
    ("tensor", "tensor"),
    ("topo", "topological"),
    ("transc", "transcendental"),
    ("trig", "trigonometric"),
    ("units", "unit conversion"),
    ("veccalc", "vector calculus"),
    ("vector", "vector"),
    ("volume", "volumetric"),
];

/// Symbol-name pool for generated dictionaries. Any 8 consecutive entries
/// (wrapping) are distinct, so per-dictionary name slices never collide.
const SYMBOL_POOL: &[&str] = &[
    "apply",
    "approx",
    "argmax",
    "argmin",
    "bound",
    "ceiling",
    "compose",
    "conjugate",
    "cumsum",
    "degree",
    "difference",
    "divide",
    "domain",
    "evaluate",
    "extend",
    "factor",
    "floor",
    "image",
    "inverse",
    "iterate",
    "join",
    "kernel",
    "magnitude",
    "measure_of",
    "midpoint",
    "negate",
    "orbit",
    "partition",
    "project",
    "quotient",
    "reduce",
    "reflect",
    "residue",
    "restrict",
    "scale",
    "shift",
    "span",
    "split",
    "trace_of",
    "transform",
];

/// Handwritten arithmetic dictionary: (name, description, cmps, examples).
const ARITH_SYMBOLS: &[(&str, &str, &[&str], &[&str])] = &[
    (
        "gcd",
        "Greatest common divisor of two or more integers",
        &["gcd(a,b) * lcm(a,b) = a * b"],
        &["gcd(6,9) = 3"],
    ),
    (
        "lcm",
        "Least common multiple of two or more integers",
        &["gcd(a,b) * lcm(a,b) = a * b"],
        &["lcm(4,6) = 12"],
    ),
    (
        "plus",
        "The n-ary addition operator on numbers",
        &["for all a,b in R a + b = b + a"],
        &["2 + 3 = 5"],
    ),
    (
        "minus",
        "The binary subtraction operator on numbers",
        &["a - b = a + (-1) * b"],
        &["7 - 2 = 5"],
    ),
    (
        "times",
        "The n-ary multiplication operator on numbers",
        &["for all a,b in R a * b = b * a"],
        &["3 * 4 = 12"],
    ),
    (
        "divide",
        "The binary division operator yielding a quotient",
        &["If b != 0 then b * (a / b) = a"],
        &["12 / 4 = 3"],
    ),
    (
        "power",
        "Raises a base to an integer or rational exponent",
        &["x^a * x^b = x^(a + b)"],
        &["2^3 = 8"],
    ),
    (
        "abs",
        "Absolute value of a real number",
        &["If x >= 0 then abs(x) = x"],
        &["abs(-3) = 3"],
    ),
];

/// Protocol/meta dictionaries excluded by the bundled filter list.
const FILTERED_CDS: &[(&str, &[&str])] = &[
    (
        "altenc",
        &[
            "MathML_encoding",
            "LaTeX_encoding",
            "ASCII_encoding",
            "presentation_form",
            "content_form",
            "image_form",
            "audio_form",
            "braille_form",
            "html_form",
            "unicode_form",
        ],
    ),
    (
        "error",
        &[
            "unhandled_symbol",
            "unexpected_symbol",
            "unsupported_CD",
            "malformed_expression",
            "division_by_zero",
            "overflow",
            "underflow",
            "invalid_argument",
            "timeout",
        ],
    ),
    (
        "meta",
        &[
            "CDBase",
            "CDComment",
            "CDDate",
            "CDDefinition",
            "CDName",
            "CDReviewDate",
            "CDRevisionDate",
            "CDStatus",
            "CDURL",
            "CDUses",
            "CDVersion",
            "CMP",
            "Description",
            "Discussion",
            "Example",
            "FMP",
            "Name",
            "Pragmatic",
            "Role",
            "Title",
        ],
    ),
    (
        "metagrp",
        &[
            "CDGroup",
            "CDGroupName",
            "CDGroupVersion",
            "CDGroupURL",
            "CDGroupDescription",
            "CDGroupMember",
            "CDGroupComment",
            "CDGroupStatus",
            "CDGroupBase",
            "CDGroupDate",
            "CDGroupReviewDate",
            "CDGroupRevision",
        ],
    ),
    (
        "metasig",
        &[
            "Signature",
            "Type",
            "mapsto",
            "nassoc",
            "nary",
            "binary",
            "unary",
            "constant",
            "object",
            "attribution",
            "application",
            "binding",
            "error_type",
            "symbol_type",
            "variable_type",
        ],
    ),
    (
        "prog1",
        &[
            "assign",
            "block",
            "call_arguments",
            "declare",
            "for_loop",
            "while_loop",
            "if_else",
            "return_value",
            "break_loop",
            "continue_loop",
            "function_definition",
            "local_var",
            "global_var",
            "array_ref",
            "field_ref",
            "print_statement",
            "comment",
        ],
    ),
];

/// A field the automatic paths cannot convert, recorded for the corrections
/// overlay.
#[derive(Debug, Clone, PartialEq)]
pub struct UnconvertibleField {
    pub symbol_id: String,
    pub field_path: String,
    pub original: String,
}

/// What `write_corpus` produced.
#[derive(Debug, Clone)]
pub struct CorpusStats {
    pub cd_files: usize,
    pub sts_files: usize,
    pub symbols_total: usize,
    /// Unconvertible fields of indexed symbols, in generation order.
    pub unconvertible: Vec<UnconvertibleField>,
}

fn mix(seed: u64, a: u64) -> u64 {
    seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Names and symbol lists of the mathematical dictionaries, in generation
/// order. Pure function of the constants, shared by the corpus writer and
/// the filter-list builder.
fn math_cd_layout() -> Vec<(String, &'static str, Vec<String>)> {
    let mut out = Vec::new();
    let mut extra_left = 4usize; // first four generated dictionaries get 8 symbols
    for (bi, &(base, topic)) in MATH_CD_BASES.iter().enumerate() {
        let max_suffix = if bi < 10 { 3 } else { 2 };
        for sfx in 1..=max_suffix {
            let name = format!("{base}{sfx}");
            let ci = out.len();
            let symbols: Vec<String> = if name == "arith1" {
                ARITH_SYMBOLS.iter().map(|&(n, ..)| n.to_string()).collect()
            } else {
                let count = if extra_left > 0 {
                    extra_left -= 1;
                    8
                } else {
                    7
                };
                (0..count)
                    .map(|k| SYMBOL_POOL[(ci * 11 + k) % SYMBOL_POOL.len()].to_string())
                    .collect()
            };
            out.push((name, topic, symbols));
        }
    }
    out
}

/// The bundled filter list: all six protocol dictionaries plus 15 individual
/// symbols from the mathematical dictionaries.
pub fn corpus_filters() -> FilterList {
    let symbols = math_cd_layout()
        .into_iter()
        .filter(|(name, ..)| name != "arith1")
        .take(15)
        .map(|(name, _, syms)| format!("{name}:{}", syms[2]))
        .collect();
    FilterList {
        cds: FILTERED_CDS.iter().map(|&(n, _)| n.to_string()).collect(),
        symbols,
    }
}

struct GenSymbol {
    name: String,
    description: String,
    desc_convertible: bool,
    /// (text, convertible)
    cmps: Vec<(String, bool)>,
    examples: Vec<String>,
    fmp: bool,
}

fn gen_symbol(name: &str, topic: &str, rng: &mut ChaCha8Rng) -> GenSymbol {
    let prose_name = name.replace('_', " ");
    let desc_convertible = rng.random_range(0..100u32) >= 2;
    let description = if desc_convertible {
        match rng.random_range(0..4u8) {
            0 => format!("The {prose_name} operation for {topic} expressions"),
            1 => format!("Returns the {prose_name} of the given {topic} arguments"),
            2 => format!("Applies the {prose_name} construction to {topic} values"),
            _ => format!("Predicate testing the {prose_name} relation on {topic} objects"),
        }
    } else {
        format!("Curried map taking lambda x to a {topic} transform")
    };
    let r = rng.random_range(0..100u32);
    let cmp_count = if r < 15 {
        0
    } else if r < 55 {
        1
    } else if r < 85 {
        2
    } else {
        3
    };
    let mut cmps = Vec::with_capacity(cmp_count);
    for _ in 0..cmp_count {
        let convertible = rng.random_range(0..100u32) >= 35;
        let text = if convertible {
            match rng.random_range(0..5u8) {
                0 => format!("{name}(a,b) = {name}(b,a)"),
                1 => format!("{name}(a,{name}(b,c)) = {name}({name}(a,b),c)"),
                2 => format!("If a > 0 then {name}(a,a) = a"),
                3 => format!("for all a,b in S {name}(a,b) = {name}(b,a)"),
                _ => format!("{name}(a,1) = a"),
            }
        } else {
            match rng.random_range(0..3u8) {
                0 => format!("lambda x: {name}(x) preserves order"),
                1 => format!("{name} maps x -> {name}(x) for each x"),
                _ => format!("diff(lambda y: {name}(y)) = {name}"),
            }
        };
        cmps.push((text, convertible));
    }
    let r = rng.random_range(0..100u32);
    let example_count = if r < 30 {
        0
    } else if r < 80 {
        1
    } else {
        2
    };
    let mut examples = Vec::with_capacity(example_count);
    for _ in 0..example_count {
        let a = rng.random_range(2..=9u32);
        let b = rng.random_range(2..=9u32);
        let c = rng.random_range(2..=20u32);
        examples.push(if rng.random::<bool>() {
            format!("{name}({a},{b}) = {c}")
        } else {
            format!("{name}({a}) = {c}")
        });
    }
    let fmp = rng.random_range(0..100u32) < 20;
    GenSymbol {
        name: name.to_string(),
        description,
        desc_convertible,
        cmps,
        examples,
        fmp,
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn render_ocd(cd_name: &str, topic: &str, symbols: &[GenSymbol]) -> String {
    let mut x = String::new();
    x.push_str("<CD xmlns=\"http://www.openmath.org/OpenMathCD\">\n");
    x.push_str(&format!("  <CDName>{cd_name}</CDName>\n"));
    x.push_str("  <CDReviewDate>2027-01-01</CDReviewDate>\n");
    x.push_str("  <CDStatus>experimental</CDStatus>\n");
    x.push_str(&format!(
        "  <Description>Symbols for {} mathematics</Description>\n",
        xml_escape(topic)
    ));
    for sym in symbols {
        x.push_str("  <CDDefinition>\n");
        x.push_str(&format!("    <Name>{}</Name>\n", sym.name));
        x.push_str(&format!(
            "    <Description>{}</Description>\n",
            xml_escape(&sym.description)
        ));
        for (cmp, _) in &sym.cmps {
            x.push_str(&format!("    <CMP>{}</CMP>\n", xml_escape(cmp)));
        }
        for ex in &sym.examples {
            x.push_str(&format!("    <Example>{}</Example>\n", xml_escape(ex)));
        }
        if sym.fmp {
            x.push_str(
                "    <FMP><OMOBJ><OMA><OMS cd=\"relation1\" name=\"eq\"/>\
                 <OMV name=\"a\"/><OMV name=\"a\"/></OMA></OMOBJ></FMP>\n",
            );
        }
        x.push_str("  </CDDefinition>\n");
    }
    x.push_str("</CD>\n");
    x
}

/// Signature bodies rotated across generated dictionaries.
fn sts_body(variant: usize) -> &'static str {
    match variant % 3 {
        0 => {
            "<OMA><OMS cd=\"sts\" name=\"mapsto\"/>\
             <OMV name=\"X\"/><OMV name=\"X\"/><OMV name=\"X\"/></OMA>"
        }
        1 => "<OMA><OMS cd=\"sts\" name=\"mapsto\"/><OMV name=\"R\"/><OMV name=\"R\"/></OMA>",
        _ => {
            "<OMA><OMS cd=\"sts\" name=\"mapsto\"/>\
             <OMA><OMS cd=\"sts\" name=\"nassoc\"/><OMV name=\"Mag\"/></OMA>\
             <OMV name=\"Mag\"/></OMA>"
        }
    }
}

fn render_sts(cd_name: &str, entries: &[(String, String)]) -> String {
    let mut x = String::new();
    x.push_str(&format!(
        "<CDSignatures type=\"sts\" cd=\"{cd_name}\" \
         xmlns=\"http://www.openmath.org/OpenMathCDS\">\n"
    ));
    for (name, body) in entries {
        x.push_str(&format!("  <Signature name=\"{name}\">\n"));
        x.push_str(&format!("    <OMOBJ>{body}</OMOBJ>\n"));
        x.push_str("  </Signature>\n");
    }
    x.push_str("</CDSignatures>\n");
    x
}

const GCD_SIGNATURE: &str = "<OMA><OMS cd=\"sts\" name=\"mapsto\"/>\
     <OMA><OMS cd=\"sts\" name=\"nassoc\"/><OMV name=\"SemiGroup\"/></OMA>\
     <OMV name=\"SemiGroup\"/></OMA>";

/// Write the corpus into `dir` (`<cd>.ocd` plus `.sts` for every second
/// mathematical dictionary).
pub fn write_corpus(dir: &Path) -> io::Result<CorpusStats> {
    std::fs::create_dir_all(dir)?;
    let filters = corpus_filters();
    let mut stats = CorpusStats {
        cd_files: 0,
        sts_files: 0,
        symbols_total: 0,
        unconvertible: Vec::new(),
    };
    for (ci, (cd_name, topic, symbol_names)) in math_cd_layout().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(CORPUS_SEED, ci as u64));
        let symbols: Vec<GenSymbol> = if cd_name == "arith1" {
            ARITH_SYMBOLS
                .iter()
                .map(|&(name, desc, cmps, examples)| GenSymbol {
                    name: name.to_string(),
                    description: desc.to_string(),
                    desc_convertible: true,
                    cmps: cmps.iter().map(|c| (c.to_string(), true)).collect(),
                    examples: examples.iter().map(|e| e.to_string()).collect(),
                    fmp: name == "gcd",
                })
                .collect()
        } else {
            symbol_names
                .iter()
                .map(|n| gen_symbol(n, topic, &mut rng))
                .collect()
        };
        for sym in &symbols {
            stats.symbols_total += 1;
            let symbol_id = format!("{cd_name}:{}", sym.name);
            if filters.is_filtered(&cd_name, &symbol_id) {
                continue;
            }
            if !sym.desc_convertible {
                stats.unconvertible.push(UnconvertibleField {
                    symbol_id: symbol_id.clone(),
                    field_path: "description".into(),
                    original: sym.description.clone(),
                });
            }
            for (k, (text, convertible)) in sym.cmps.iter().enumerate() {
                if !convertible {
                    stats.unconvertible.push(UnconvertibleField {
                        symbol_id: symbol_id.clone(),
                        field_path: format!("cmp_properties[{k}]"),
                        original: text.clone(),
                    });
                }
            }
        }
        std::fs::write(
            dir.join(format!("{cd_name}.ocd")),
            render_ocd(&cd_name, topic, &symbols),
        )?;
        stats.cd_files += 1;
        if ci % 2 == 0 {
            let entries: Vec<(String, String)> = if cd_name == "arith1" {
                vec![
                    ("gcd".to_string(), GCD_SIGNATURE.to_string()),
                    ("lcm".to_string(), GCD_SIGNATURE.to_string()),
                    ("plus".to_string(), sts_body(0).to_string()),
                ]
            } else {
                symbols
                    .iter()
                    .take(3)
                    .enumerate()
                    .map(|(k, s)| (s.name.clone(), sts_body(ci + k).to_string()))
                    .collect()
            };
            std::fs::write(
                dir.join(format!("{cd_name}.sts")),
                render_sts(&cd_name, &entries),
            )?;
            stats.sts_files += 1;
        }
    }
    for &(cd_name, symbol_names) in FILTERED_CDS {
        let symbols: Vec<GenSymbol> = symbol_names
            .iter()
            .map(|&n| GenSymbol {
                name: n.to_string(),
                description: format!(
                    "Protocol element {} used by the dictionary encoding",
                    n.replace('_', " ")
                ),
                desc_convertible: true,
                cmps: Vec::new(),
                examples: Vec::new(),
                fmp: false,
            })
            .collect();
        stats.symbols_total += symbols.len();
        std::fs::write(
            dir.join(format!("{cd_name}.ocd")),
            render_ocd(cd_name, "dictionary protocol", &symbols),
        )?;
        stats.cd_files += 1;
    }
    Ok(stats)
}

/// Manual corrections for the first six unconvertible fields: the hand-made
/// LaTeX the automatic paths cannot produce.
pub fn corpus_corrections(stats: &CorpusStats) -> Vec<CorrectionRecord> {
    stats
        .unconvertible
        .iter()
        .take(6)
        .map(|u| {
            let name = u.symbol_id.split(':').nth(1).unwrap_or("f");
            let tex = escape_text(name);
            let replacement = if u.original.starts_with("lambda x:") {
                format!("\\lambda x.\\ \\text{{{tex}}}(x) \\text{{ preserves order}}")
            } else if u.original.contains("maps x ->") {
                format!("\\text{{{tex}}}\\colon x \\mapsto \\text{{{tex}}}(x)")
            } else if u.original.starts_with("diff(") {
                format!("\\frac{{d}}{{dy}}\\,\\text{{{tex}}}(y) = \\text{{{tex}}}")
            } else {
                "\\lambda x.\\ \\text{a transformed value of }x".to_string()
            };
            CorrectionRecord {
                symbol_id: u.symbol_id.clone(),
                field_path: u.field_path.clone(),
                replacement,
            }
        })
        .collect()
}

/// English stopword list for the lexical index (well above the required
/// minimum of 70 entries).
pub fn stopword_list() -> Vec<String> {
    const WORDS: &[&str] = &[
        "a", "about", "above", "after", "again", "all", "also", "an", "and", "any", "are", "as",
        "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by",
        "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
        "from", "further", "given", "had", "has", "have", "having", "he", "her", "here", "his",
        "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "more", "most", "no",
        "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "out",
        "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the",
        "their", "them", "then", "there", "these", "they", "this", "those", "through", "to", "too",
        "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "why", "will", "with", "you", "your",
    ];
    WORDS.iter().map(|s| s.to_string()).collect()
}
